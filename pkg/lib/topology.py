"""
Instance validation and graph-analytic quantities of a selection.

Covers the spectral gap of the L-L cooperation graph and the accumulated
dataset sizes driven by the selected I-L edges.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable

import networkx as nx
import numpy as np

from .errors import TopologyError
from .models import EdgeKey, Topology

logger = logging.getLogger(__name__)

# Moduli closer than this count as equal when ordering eigenvalues.
EIG_TOL = 1e-9


# ── Validation ────────────────────────────────────────────────────────────────

def _check_cost(value: float, what: str, element: object) -> None:
    if not math.isfinite(value) or value < 0.0:
        raise TopologyError(f"{what} must be a finite value >= 0, got {value}", element)


def validate_topology(t: Topology) -> Topology:
    """Return `t` unchanged if every invariant holds, else raise TopologyError."""
    if not t.l_nodes:
        raise TopologyError("topology needs at least one L-node")

    seen: set[str] = set()
    for node in (*t.l_nodes, *t.i_nodes):
        if node.id in seen:
            raise TopologyError(f"duplicate node id {node.id!r}", node.id)
        seen.add(node.id)
        _check_cost(node.op_cost, f"op_cost of {node.id!r}", node)

    for l in t.l_nodes:
        _check_cost(l.initial_samples, f"initial_samples of {l.id!r}", l)
    for i in t.i_nodes:
        _check_cost(i.rate, f"rate of {i.id!r}", i)

    l_ids, i_ids = set(t.l_ids), set(t.i_ids)
    ll_seen: set[EdgeKey] = set()
    for e in t.ll_candidates:
        a, b = e.endpoints
        for end in (a, b):
            if end not in l_ids:
                raise TopologyError(f"L-L edge {e.label} references unknown L-node {end!r}", end)
        if a == b:
            raise TopologyError(f"L-L edge {e.label} is a self-loop", e)
        if e.key in ll_seen:
            raise TopologyError(f"duplicate L-L edge {e.label}", e)
        ll_seen.add(e.key)
        _check_cost(e.comm_cost, f"comm_cost of {e.label}", e)

    il_seen: set[EdgeKey] = set()
    for e in t.il_candidates:
        i, l = e.endpoints
        if i not in i_ids:
            raise TopologyError(f"I-L edge {e.label} references unknown I-node {i!r}", i)
        if l not in l_ids:
            raise TopologyError(f"I-L edge {e.label} references unknown L-node {l!r}", l)
        if e.key in il_seen:
            raise TopologyError(f"duplicate I-L edge {e.label}", e)
        il_seen.add(e.key)
        _check_cost(e.comm_cost, f"comm_cost of {e.label}", e)

    logger.debug(
        "Topology valid: %d L, %d I, %d L-L and %d I-L candidates",
        len(t.l_nodes), len(t.i_nodes), len(t.ll_candidates), len(t.il_candidates),
    )
    return t


# ── Graph quantities ──────────────────────────────────────────────────────────

def cooperation_graph(topology: Topology, ll_edges: Iterable[EdgeKey]) -> nx.Graph:
    """Undirected L-L graph over all L-nodes (isolated nodes included)."""
    g = nx.Graph()
    g.add_nodes_from(topology.l_ids)
    g.add_edges_from(ll_edges)
    return g


def spectral_gap(topology: Topology, ll_edges: Iterable[EdgeKey]) -> float:
    """
    |lambda_1| - |lambda_2| of the binary symmetric adjacency matrix P.

    A single L-node has gap 1 by convention.
    """
    if len(topology.l_nodes) == 1:
        return 1.0
    g = cooperation_graph(topology, ll_edges)
    adjacency = nx.to_numpy_array(g, nodelist=topology.l_ids, dtype=float)
    moduli = np.sort(np.abs(np.linalg.eigvalsh(adjacency)))[::-1]
    gap = float(moduli[0] - moduli[1])
    return 0.0 if gap < EIG_TOL else gap


def inodes_by_lnode(topology: Topology, il_edges: Iterable[EdgeKey]) -> dict[str, list[str]]:
    """Sorted I-node ids feeding each L-node (every L-node present)."""
    feeds: dict[str, list[str]] = {l: [] for l in topology.l_ids}
    for i, l in il_edges:
        feeds[l].append(i)
    for ids in feeds.values():
        ids.sort()
    return feeds


def samples_at(topology: Topology, il_edges: Iterable[EdgeKey], l: str, k: int) -> float:
    """X^k_l = X^0_l + k * sum of the rates of the I-nodes feeding l."""
    if k < 0:
        raise ValueError(f"epoch index must be >= 0, got {k}")
    node = topology.l_by_id.get(l)
    if node is None:
        raise TopologyError(f"unknown L-node {l!r}", l)
    rate = sum(topology.i_by_id[i].rate for i, dst in il_edges if dst == l)
    return node.initial_samples + k * rate


def average_dataset_size(topology: Topology, il_edges: Iterable[EdgeKey], K: int) -> float:
    """X averaged over epochs 1..K and over L-nodes."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    n_l = len(topology.l_nodes)
    base = sum(n.initial_samples for n in topology.l_nodes) / n_l
    rate = sum(topology.i_by_id[i].rate for i, _ in il_edges)
    return base + 0.5 * (K + 1) * rate / n_l
