"""
Cheap d-regular subgraphs of the L-L candidate graph.

cheapest_uniform is a heuristic: greedy insertion by ascending cost under
degree caps, swap repair of the remaining deficits, then improving 2-swaps.
enumerate_regular_subgraphs lists every d-regular subgraph exactly and is
only meant for tiny graphs (tests, exhaustive baselines).
"""
from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator
from itertools import combinations
from typing import Optional

from .models import EdgeKey, Topology, ll_key

logger = logging.getLogger(__name__)

# Improving swaps stop after SWAP_CAP_FACTOR * |L|^2 applications.
SWAP_CAP_FACTOR = 10


def _degree_ok(topology: Topology, d: int) -> bool:
    n = len(topology.l_nodes)
    if d == 0:
        return True
    return 1 <= d <= n - 1 and (d * n) % 2 == 0


def _repair(topology: Topology, chosen: set[EdgeKey], deg: Counter, d: int) -> bool:
    """Close degree deficits; False when no move is left."""
    cost = topology.ll_cost
    while True:
        deficient = sorted(l for l in topology.l_ids if deg[l] < d)
        if not deficient:
            return True

        moves: list[tuple[float, tuple, list[EdgeKey], list[EdgeKey]]] = []
        # Direct edge between two deficient nodes.
        for u, v in combinations(deficient, 2):
            e = ll_key(u, v)
            if e in cost and e not in chosen:
                moves.append((cost[e], (0, e), [e], []))
        # Drop (x, y), add (u, x) and (v, y): x and y keep their degree.
        for u in deficient:
            for v in deficient:
                if u == v and d - deg[u] < 2:
                    continue
                for x, y in sorted(chosen):
                    for a, b in ((x, y), (y, x)):
                        if len({u, a}) < 2 or len({v, b}) < 2:
                            continue
                        ua, vb = ll_key(u, a), ll_key(v, b)
                        if ua == vb or ua in chosen or vb in chosen:
                            continue
                        if ua not in cost or vb not in cost:
                            continue
                        delta = cost[ua] + cost[vb] - cost[(x, y)]
                        moves.append((delta, (1, ua, vb, (x, y)), [ua, vb], [(x, y)]))
        if not moves:
            return False

        _, _, add, drop = min(moves, key=lambda m: (m[0], m[1]))
        for e in drop:
            chosen.discard(e)
            deg[e[0]] -= 1
            deg[e[1]] -= 1
        for e in add:
            chosen.add(e)
            deg[e[0]] += 1
            deg[e[1]] += 1


def _improve(topology: Topology, chosen: set[EdgeKey], cap: int) -> int:
    """Apply improving 2-swaps (a-b, c-d) -> (a-c, b-d) or (a-d, b-c)."""
    cost = topology.ll_cost
    swaps = 0
    improved = True
    while improved and swaps < cap:
        improved = False
        edges = sorted(chosen)
        for (a, b), (c, d) in combinations(edges, 2):
            if len({a, b, c, d}) < 4:
                continue
            current = cost[(a, b)] + cost[(c, d)]
            for e1, e2 in ((ll_key(a, c), ll_key(b, d)), (ll_key(a, d), ll_key(b, c))):
                if e1 in chosen or e2 in chosen or e1 not in cost or e2 not in cost:
                    continue
                if cost[e1] + cost[e2] < current - 1e-12:
                    chosen.difference_update({(a, b), (c, d)})
                    chosen.update({e1, e2})
                    swaps += 1
                    improved = True
                    break
            if improved:
                break
    return swaps


def cheapest_uniform(topology: Topology, d_L: int) -> Optional[frozenset[EdgeKey]]:
    """
    A cheap d_L-regular subgraph of the L-L candidates, or None.

    d_L = 0 gives the empty set. None is returned when the parity
    condition fails, d_L is out of range, or the heuristic cannot reach
    exact regularity.
    """
    if not _degree_ok(topology, d_L):
        return None
    if d_L == 0:
        return frozenset()

    deg: Counter = Counter()
    chosen: set[EdgeKey] = set()
    for e in sorted(topology.ll_keys, key=lambda k: (topology.ll_cost[k], k)):
        a, b = e
        if deg[a] < d_L and deg[b] < d_L:
            chosen.add(e)
            deg[a] += 1
            deg[b] += 1

    if not _repair(topology, chosen, deg, d_L):
        logger.debug("No %d-regular repair found for %d L-nodes", d_L, len(topology.l_nodes))
        return None

    n = len(topology.l_nodes)
    swaps = _improve(topology, chosen, SWAP_CAP_FACTOR * n * n)

    final = Counter()
    for a, b in chosen:
        final[a] += 1
        final[b] += 1
    if any(final[l] != d_L for l in topology.l_ids):
        return None
    logger.debug("Regular degree %d: %d edges, %d improving swaps", d_L, len(chosen), swaps)
    return frozenset(chosen)


def enumerate_regular_subgraphs(topology: Topology, d_L: int) -> Iterator[frozenset[EdgeKey]]:
    """Every d_L-regular subgraph of the candidate graph (backtracking)."""
    if not _degree_ok(topology, d_L):
        return
    if d_L == 0:
        yield frozenset()
        return

    edges = topology.ll_keys
    # Candidate edges still ahead of position j, per node.
    remaining = [Counter() for _ in range(len(edges) + 1)]
    for j in range(len(edges) - 1, -1, -1):
        remaining[j] = remaining[j + 1].copy()
        remaining[j][edges[j][0]] += 1
        remaining[j][edges[j][1]] += 1

    deg: Counter = Counter()
    chosen: list[EdgeKey] = []

    def walk(j: int) -> Iterator[frozenset[EdgeKey]]:
        if any(deg[l] + remaining[j][l] < d_L for l in topology.l_ids):
            return
        if j == len(edges):
            yield frozenset(chosen)
            return
        a, b = edges[j]
        if deg[a] < d_L and deg[b] < d_L:
            deg[a] += 1
            deg[b] += 1
            chosen.append(edges[j])
            yield from walk(j + 1)
            chosen.pop()
            deg[a] -= 1
            deg[b] -= 1
        yield from walk(j + 1)

    yield from walk(0)
