"""
Topology optimizers: the DoubleClimb algorithm and its baselines.

All algorithms restrict the L-L graph to uniform degree d_L (cheapest
d_L-regular subgraph per degree) and choose the I-L edges on top of it:

    double_climb   greedy cost/benefit over I-L edges per degree, early stop
    opt_unif       every L-node takes its d_I cheapest I-L edges
    genetic        GA over I-L bit strings per degree
    brute_force    every I-L subset per degree (guarded by a state bound)

Every optimizer returns an OptimizationOutcome; infeasibility is a value.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, TypeVar, Union

import numpy as np

from .config import Settings
from .errors import InstanceTooLargeError
from .evaluator import Evaluator
from .learning import min_epochs, per_epoch_cost
from .models import (
    EdgeKey,
    EvaluationResult,
    GaParams,
    LearningProfile,
    OptimizationOutcome,
    Solution,
    Topology,
    TraceEntry,
    edge_label,
)
from .regular import cheapest_uniform, enumerate_regular_subgraphs
from .topology import spectral_gap

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=Hashable)

ALGORITHMS = ("double-climb", "opt-unif", "ga", "brute-force")


# ── Generic greedy ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GreedyStep:
    element: Hashable
    cost: float
    value: float
    ratio: float


@dataclass
class GreedyResult:
    selected: frozenset
    feasible: bool
    steps: list[GreedyStep] = field(default_factory=list)
    rounds: int = 0


def greedy_submodular(
    ground: Iterable[T],
    cost_fn: Callable[[frozenset], float],
    constraint_fn: Callable[[frozenset], float],
    threshold: float,
    key: Optional[Callable[[T], object]] = None,
    map_fn: Callable = map,
    initial: Iterable[T] = (),
) -> GreedyResult:
    """
    Grow S by the element of least marginal cost per unit of marginal benefit.

    Only elements with strictly positive benefit qualify; ties break on the
    ratio, then the marginal cost, then `key`. Stops once
    constraint_fn(S) >= threshold or no element qualifies.
    """
    key = key or (lambda j: j)
    ground = sorted(set(ground), key=key)
    selected = frozenset(initial)
    f_s, g_s = cost_fn(selected), constraint_fn(selected)
    out = GreedyResult(selected, g_s >= threshold)

    while g_s < threshold:
        remaining = [j for j in ground if j not in selected]
        if not remaining:
            break
        out.rounds += 1
        scored = list(map_fn(lambda j: (cost_fn(selected | {j}), constraint_fn(selected | {j})),
                             remaining))
        best = None
        for j, (f_j, g_j) in zip(remaining, scored):
            benefit = g_j - g_s
            if not (benefit > 0.0):
                continue
            delta = f_j - f_s
            rank = (delta / benefit, delta, key(j))
            if best is None or rank < best[0]:
                best = (rank, j, f_j, g_j)
        if best is None:
            break
        (ratio, _, _), j, f_s, g_s = best
        selected = selected | {j}
        out.steps.append(GreedyStep(j, f_s, g_s, ratio))

    out.selected = selected
    out.feasible = g_s >= threshold
    return out


# ── Shared helpers ────────────────────────────────────────────────────────────

def feasible_degrees(topology: Topology) -> list[int]:
    """Degrees d_L the optimizers visit: 1..|L|-1, or [0] for a single L-node."""
    n = len(topology.l_nodes)
    return [0] if n == 1 else list(range(1, n))


@contextmanager
def _mapper(settings: Settings):
    if settings.threads <= 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        yield pool.map


def _row(step: int, d_L: int, kind: str, edge_id: str,
         result: Optional[EvaluationResult]) -> TraceEntry:
    if result is None:
        return TraceEntry(step, d_L, kind, edge_id, math.nan, math.nan,
                          math.nan, math.nan, False)
    return TraceEntry(step, d_L, kind, edge_id, result.cost, result.margin,
                      result.g1, result.g2, result.feasible)


def _split_costs(topology: Topology, solution: Solution) -> tuple[float, float]:
    """(C_LL, C_IL) of a solution over its K epochs."""
    sel = solution.selection
    c_ll = sum(topology.ll_cost[e] for e in sel.ll_edges)
    used = {i for i, _ in sel.il_edges}
    c_il = sum(topology.il_cost[e] for e in sel.il_edges)
    c_il += sum(topology.i_by_id[i].op_cost for i in used)
    return sel.epochs * c_ll, sel.epochs * c_il


def _infeasible_reason(profile: LearningProfile) -> str:
    if profile.below_error_floor:
        return "infeasible: error floor"
    return "infeasible: no feasible topology"


def _cheaper(candidate: Solution, best: Optional[Solution]) -> bool:
    return candidate.feasible and (best is None or candidate.cost < best.cost)


def _finish(algorithm: str, best: Optional[Solution], trace: list[TraceEntry],
            iterations: int, ev: Evaluator, profile: LearningProfile) -> OptimizationOutcome:
    outcome = OptimizationOutcome(
        algorithm=algorithm,
        solution=best,
        trace=trace,
        iterations=iterations,
        evaluations=ev.evaluations,
        reason="feasible" if best is not None else _infeasible_reason(profile),
    )
    logger.info(
        "%s: %s, cost=%s, %d iterations, %d evaluations",
        algorithm, outcome.reason, f"{best.cost:.6g}" if best else "inf",
        iterations, ev.evaluations,
    )
    return outcome


# ── DoubleClimb ───────────────────────────────────────────────────────────────

def double_climb(
    topology: Topology,
    profile: LearningProfile,
    settings: Optional[Settings] = None,
    evaluator: Optional[Evaluator] = None,
    stop_rule: bool = True,
) -> OptimizationOutcome:
    """
    Outer climb over the uniform L-L degree, inner greedy over I-L edges.

    For each d_L the cheapest d_L-regular L-L graph is fixed and I-L edges
    are added by least c_il / (g(il + e) - g(il)) until the constraints
    hold. With `stop_rule` the climb ends as soon as a feasible solution is
    strictly more expensive than the best one in both its L-L and its I-L
    cost share.
    """
    settings = settings or Settings()
    ev = evaluator or Evaluator(topology, profile, settings)
    best: Optional[Solution] = None
    trace: list[TraceEntry] = []
    iterations = 0

    with _mapper(settings) as map_fn:
        for d_L in feasible_degrees(topology):
            ll = cheapest_uniform(topology, d_L)
            if ll is None:
                trace.append(_row(len(trace), d_L, "SKIP", f"regular-{d_L}", None))
                continue
            trace.append(_row(len(trace), d_L, "LL", f"regular-{d_L}", ev(ll, ())))

            greedy = greedy_submodular(
                topology.il_keys,
                cost_fn=lambda S: per_epoch_cost(topology, ll, S),
                constraint_fn=lambda S: ev(ll, S).margin,
                threshold=1.0,
                key=lambda e: (topology.il_cost[e], e),
                map_fn=map_fn,
            )
            iterations += greedy.rounds
            added: set[EdgeKey] = set()
            for step in greedy.steps:
                added.add(step.element)
                trace.append(_row(len(trace), d_L, "IL", edge_label(step.element, "il"),
                                  ev(ll, added)))

            if not greedy.feasible:
                continue
            current = ev.solution(ll, greedy.selected)
            if not current.feasible:
                continue
            if stop_rule and best is not None:
                cur_ll, cur_il = _split_costs(topology, current)
                best_ll, best_il = _split_costs(topology, best)
                if cur_ll > best_ll and cur_il > best_il:
                    logger.debug("Stop rule fired at d_L=%d", d_L)
                    break
            if _cheaper(current, best):
                best = current

    return _finish("double-climb", best, trace, iterations, ev, profile)


# ── Opt-Unif ──────────────────────────────────────────────────────────────────

def uniform_il(topology: Topology, d_I: int) -> Optional[frozenset[EdgeKey]]:
    """Each L-node's d_I cheapest I-L candidates, or None if one has fewer."""
    by_node: dict[str, list[EdgeKey]] = {l: [] for l in topology.l_ids}
    for e in topology.il_keys:
        by_node[e[1]].append(e)
    chosen: set[EdgeKey] = set()
    for l, edges in by_node.items():
        if len(edges) < d_I:
            return None
        edges.sort(key=lambda e: (topology.il_cost[e], e))
        chosen.update(edges[:d_I])
    return frozenset(chosen)


def opt_unif(
    topology: Topology,
    profile: LearningProfile,
    settings: Optional[Settings] = None,
    evaluator: Optional[Evaluator] = None,
) -> OptimizationOutcome:
    """Cheapest feasible pair of uniform L-L degree and uniform per-L-node I-L degree."""
    settings = settings or Settings()
    ev = evaluator or Evaluator(topology, profile, settings)
    best: Optional[Solution] = None
    trace: list[TraceEntry] = []
    iterations = 0

    for d_L in feasible_degrees(topology):
        ll = cheapest_uniform(topology, d_L)
        if ll is None:
            trace.append(_row(len(trace), d_L, "SKIP", f"regular-{d_L}", None))
            continue
        pairs = []
        for d_I in range(len(topology.i_nodes) + 1):
            il = uniform_il(topology, d_I)
            if il is None:
                break
            pairs.append((d_I, il))
        results = ev.evaluate_many([(ll, il) for _, il in pairs])
        for (d_I, il), result in zip(pairs, results):
            iterations += 1
            trace.append(_row(len(trace), d_L, "UNIF", f"regular-{d_L}/d_I={d_I}", result))
            if result.feasible:
                current = ev.solution(ll, il)
                if _cheaper(current, best):
                    best = current

    return _finish("opt-unif", best, trace, iterations, ev, profile)


# ── Genetic algorithm ─────────────────────────────────────────────────────────

Seed = Union[int, np.random.SeedSequence]


def _fitness(results: Sequence[EvaluationResult], c_max: float) -> np.ndarray:
    out = np.empty(len(results))
    for j, r in enumerate(results):
        if r.feasible:
            out[j] = -r.cost
        else:
            g = r.margin if math.isfinite(r.margin) else 0.0
            out[j] = -c_max * (2.0 - min(max(g, 0.0), 1.0))
    return out


def ga_inner(
    topology: Topology,
    profile: LearningProfile,
    d_L: int,
    params: GaParams = GaParams(),
    seed: Seed = 0,
    settings: Optional[Settings] = None,
    evaluator: Optional[Evaluator] = None,
) -> frozenset[EdgeKey]:
    """
    Best I-L set found by a GA on top of the cheapest d_L-regular L-L graph.

    Genes are the I-L candidates in `topology.il_keys` order. Fitness is
    -cost for feasible individuals and -C_max * (2 - g) otherwise, with
    C_max the cost of every candidate edge over K_cap epochs.
    """
    settings = settings or Settings()
    ev = evaluator or Evaluator(topology, profile, settings)
    ll = cheapest_uniform(topology, d_L)
    if ll is None:
        raise ValueError(f"no {d_L}-regular L-L subgraph available")
    genes = topology.il_keys
    if not genes:
        return frozenset()

    rng = np.random.default_rng(seed)
    n = len(genes)
    c_max = max(settings.k_cap * per_epoch_cost(topology, topology.ll_keys, genes), 1.0)

    def decode(ind: np.ndarray) -> frozenset[EdgeKey]:
        return frozenset(genes[j] for j in np.flatnonzero(ind))

    def score(pop: np.ndarray) -> np.ndarray:
        return _fitness(ev.evaluate_many([(ll, decode(ind)) for ind in pop]), c_max)

    population = rng.integers(0, 2, size=(params.population, n)).astype(bool)
    fitness = score(population)
    best_j = int(np.argmax(fitness))
    best_ind, best_fit = population[best_j].copy(), fitness[best_j]

    n_children = params.population - params.parents_mating
    for gen in range(params.generations):
        # Tournament selection of size 3.
        contenders = rng.integers(0, params.population, size=(params.parents_mating, 3))
        winners = contenders[np.arange(params.parents_mating),
                             np.argmax(fitness[contenders], axis=1)]
        parents = population[winners]

        children = np.empty((n_children, n), dtype=bool)
        for c in range(n_children):
            p1 = parents[c % params.parents_mating]
            p2 = parents[(c + 1) % params.parents_mating]
            point = int(rng.integers(1, n)) if n > 1 else 1
            children[c, :point] = p1[:point]
            children[c, point:] = p2[point:]
        children ^= rng.random((n_children, n)) < params.mutation_prob

        population = np.vstack([parents, children])
        fitness = score(population)
        j = int(np.argmax(fitness))
        if fitness[j] > best_fit:
            best_ind, best_fit = population[j].copy(), fitness[j]
        logger.debug("GA d_L=%d generation %d: best fitness %.6g", d_L, gen, best_fit)

    return decode(best_ind)


def genetic(
    topology: Topology,
    profile: LearningProfile,
    params: GaParams = GaParams(),
    seed: int = 0,
    settings: Optional[Settings] = None,
    evaluator: Optional[Evaluator] = None,
) -> OptimizationOutcome:
    """GA baseline: ga_inner for every degree, cheapest feasible result kept."""
    settings = settings or Settings()
    ev = evaluator or Evaluator(topology, profile, settings)
    best: Optional[Solution] = None
    trace: list[TraceEntry] = []
    iterations = 0

    for d_L in feasible_degrees(topology):
        ll = cheapest_uniform(topology, d_L)
        if ll is None:
            trace.append(_row(len(trace), d_L, "SKIP", f"regular-{d_L}", None))
            continue
        il = ga_inner(topology, profile, d_L, params,
                      np.random.SeedSequence([seed, d_L]), settings, ev)
        iterations += params.generations
        current = ev.solution(ll, il)
        trace.append(_row(len(trace), d_L, "GA", f"regular-{d_L}", current.result))
        if _cheaper(current, best):
            best = current

    return _finish("ga", best, trace, iterations, ev, profile)


# ── Brute force ───────────────────────────────────────────────────────────────

def _il_subsets(keys: Sequence[EdgeKey]) -> Iterable[frozenset[EdgeKey]]:
    for size in range(len(keys) + 1):
        for combo in combinations(keys, size):
            yield frozenset(combo)


def brute_force(
    topology: Topology,
    profile: LearningProfile,
    settings: Optional[Settings] = None,
    evaluator: Optional[Evaluator] = None,
    exhaustive_ll: bool = False,
) -> OptimizationOutcome:
    """
    Optimum over uniform L-L degrees and every I-L subset.

    By default each degree uses the cheapest d_L-regular graph, the same
    restriction the other optimizers work under; `exhaustive_ll` also
    enumerates every d_L-regular graph. Raises InstanceTooLargeError when
    the state count exceeds settings.max_brute_force_states.
    """
    settings = settings or Settings()
    ev = evaluator or Evaluator(topology, profile, settings)
    degrees = feasible_degrees(topology)
    n_subsets = 2 ** len(topology.il_keys)
    bound = settings.max_brute_force_states
    if len(degrees) * n_subsets > bound:
        raise InstanceTooLargeError(len(degrees) * n_subsets, bound)

    ll_sets: list[tuple[int, frozenset[EdgeKey]]] = []
    for d_L in degrees:
        if exhaustive_ll:
            ll_sets.extend((d_L, ll) for ll in enumerate_regular_subgraphs(topology, d_L))
        else:
            ll = cheapest_uniform(topology, d_L)
            if ll is not None:
                ll_sets.append((d_L, ll))
    states = len(ll_sets) * n_subsets
    if states > bound:
        raise InstanceTooLargeError(states, bound)

    # Error-feasible (cost, ...) for every state; time is checked in cost order.
    ranked = []
    for d_L, ll in ll_sets:
        gamma = spectral_gap(topology, ll)
        for il in _il_subsets(topology.il_keys):
            K = min_epochs(topology, ll, il, profile, settings.k_cap, gamma=gamma)
            if K is None:
                continue
            cost = K * per_epoch_cost(topology, ll, il)
            tie = (len(il), sorted(il), sorted(ll))
            ranked.append((cost, tie, d_L, ll, il))
    ranked.sort(key=lambda r: (r[0], r[1]))

    best: Optional[Solution] = None
    trace: list[TraceEntry] = []
    iterations = 0
    for cost, _, d_L, ll, il in ranked:
        iterations += 1
        result = ev(ll, il)
        if result.feasible:
            best = ev.solution(ll, il)
            trace.append(_row(0, d_L, "BF", f"regular-{d_L}", best.result))
            break

    logger.debug("Brute force: %d states, %d error-feasible, %d timed",
                 states, len(ranked), iterations)
    return _finish("brute-force", best, trace, iterations, ev, profile)


def run_algorithm(
    name: str,
    topology: Topology,
    profile: LearningProfile,
    settings: Optional[Settings] = None,
    seed: int = 0,
    params: GaParams = GaParams(),
) -> OptimizationOutcome:
    """Dispatch by algorithm name (see ALGORITHMS)."""
    settings = settings or Settings()
    if name == "double-climb":
        return double_climb(topology, profile, settings)
    if name == "opt-unif":
        return opt_unif(topology, profile, settings)
    if name == "ga":
        return genetic(topology, profile, params, seed, settings)
    if name == "brute-force":
        return brute_force(topology, profile, settings)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
