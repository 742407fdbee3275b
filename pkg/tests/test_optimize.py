import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

from lib.config import Settings
from lib.errors import InstanceTooLargeError
from lib.evaluator import Evaluator
from lib.learning import evaluate, min_epochs
from lib.models import GaParams, LearningProfile
from lib.optimize import (
    brute_force,
    double_climb,
    feasible_degrees,
    ga_inner,
    genetic,
    greedy_submodular,
    opt_unif,
    run_algorithm,
    uniform_il,
)
from lib.scenario import generate_instance
from lib.serialization import load_instance

SMALL_INSTANCES = [(3, 2, 0), (3, 3, 1), (4, 2, 2), (4, 3, 3), (3, 2, 4), (4, 2, 5)]


# ── Generic greedy ────────────────────────────────────────────────────────────

def _additive(weights):
    return lambda S: float(sum(weights[j] for j in S))


def test_greedy_single_sufficient_element():
    cost = _additive({"a": 0.5, "b": 0.5, "c": 0.5})
    value = _additive({"a": 1.0, "b": 0.4, "c": 0.4})
    out = greedy_submodular("abc", cost, value, threshold=1.0)
    assert out.selected == frozenset("a")
    assert out.feasible
    assert out.rounds == 1


def test_greedy_matches_exhaustive_optimum_on_small_knapsack():
    f = {"x": 3.0, "y": 2.0, "z": 4.0}
    g = {"x": 2.0, "y": 1.0, "z": 2.0}
    out = greedy_submodular("xyz", _additive(f), _additive(g), threshold=3.0)
    best = min(
        (sum(f[j] for j in S) for r in range(4) for S in combinations("xyz", r)
         if sum(g[j] for j in S) >= 3.0),
    )
    assert out.selected == frozenset("xy")
    assert sum(f[j] for j in out.selected) == best


def test_greedy_stops_without_positive_benefit():
    out = greedy_submodular("ab", _additive({"a": 1, "b": 1}), lambda S: 0.0, threshold=1.0)
    assert not out.feasible
    assert out.selected == frozenset()


def test_greedy_with_thread_pool_map_is_identical():
    cost = _additive({j: (j * 7) % 5 + 1.0 for j in range(8)})
    value = _additive({j: (j * 3) % 4 + 0.5 for j in range(8)})
    serial = greedy_submodular(range(8), cost, value, threshold=9.0)
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = greedy_submodular(range(8), cost, value, threshold=9.0, map_fn=pool.map)
    assert serial.selected == parallel.selected
    assert [s.element for s in serial.steps] == [s.element for s in parallel.steps]


def _coverage_problem(seed, n_sets=12, universe=30):
    rng = np.random.default_rng(seed)
    sets = {j: frozenset(rng.choice(universe, size=int(rng.integers(3, 9)), replace=False).tolist())
            for j in range(n_sets)}

    def covered(S):
        return float(len(frozenset().union(*(sets[j] for j in S)))) if S else 0.0

    return sets, covered, covered(frozenset(sets))


@pytest.mark.parametrize("seed", range(5))
def test_greedy_benefits_never_increase_under_unit_costs(seed):
    sets, covered, total = _coverage_problem(seed)
    out = greedy_submodular(sets, lambda S: float(len(S)), covered, threshold=total)
    assert out.feasible
    values = [0.0] + [s.value for s in out.steps]
    benefits = [b - a for a, b in zip(values, values[1:])]
    assert all(b > 0.0 for b in benefits)
    assert all(later <= earlier for earlier, later in zip(benefits, benefits[1:]))


@pytest.mark.parametrize("seed", range(5))
def test_greedy_ratios_never_decrease(seed):
    sets, covered, total = _coverage_problem(seed)
    weights = dict(zip(sets, np.random.default_rng(seed + 100).uniform(0.1, 2.0, len(sets))))
    out = greedy_submodular(sets, _additive(weights), covered, threshold=total)
    ratios = [s.ratio for s in out.steps]
    assert all(later >= earlier - 1e-12 for earlier, later in zip(ratios, ratios[1:]))


# ── DoubleClimb ───────────────────────────────────────────────────────────────

def test_double_climb_on_a_triangle(topology_factory, classification_profile):
    t = topology_factory(3, 2, rate=50.0)
    out = double_climb(t, classification_profile)
    assert out.feasible
    sol = out.solution
    assert sol.selection.ll_edges == frozenset(t.ll_keys)
    assert sol.selection.il_edges == frozenset()
    assert sol.result.epochs == 184
    assert out.trace[0].edge_kind == "SKIP"
    assert out.trace[0].d_L == 1
    assert out.reason == "feasible"


def test_double_climb_reports_error_floor(topology_factory):
    t = topology_factory(4, 2)
    p = LearningProfile(0.6799, 0.4978, 542.1, eps_max=0.6)
    out = double_climb(t, p, Settings(k_cap=500))
    assert out.solution is None
    assert not out.feasible
    assert out.reason == "infeasible: error floor"
    assert sorted({row.d_L for row in out.trace}) == [1, 2, 3]


def test_single_lnode_uses_degree_zero(topology_factory, classification_profile):
    t = topology_factory(1, 2)
    assert feasible_degrees(t) == [0]
    out = double_climb(t, classification_profile)
    assert out.feasible
    assert out.solution.selection.ll_edges == frozenset()
    assert out.solution.result.gamma == 1.0


def test_example_instance_prefers_the_complete_graph(example_instance_path, classification_profile):
    t = load_instance(example_instance_path)
    out = double_climb(t, classification_profile)
    assert out.solution.selection.ll_edges == frozenset(t.ll_keys)
    assert out.solution.result.epochs == 92


def test_example_instance_regression_profile(example_instance_path, regression_profile):
    t = load_instance(example_instance_path)
    out = double_climb(t, regression_profile)
    assert out.feasible
    assert out.solution.result.epochs == 48


@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES)
def test_double_climb_is_within_the_competitive_bound(n_l, n_i, seed, classification_profile):
    t = generate_instance(n_l, n_i, seed=seed)
    ev = Evaluator(t, classification_profile)
    dc = double_climb(t, classification_profile, evaluator=ev)
    bf = brute_force(t, classification_profile, evaluator=ev)
    assert dc.feasible and bf.feasible
    assert bf.solution.cost <= dc.solution.cost + 1e-9
    assert dc.solution.cost <= (1.0 + 1.0 / n_i) * bf.solution.cost + 1e-9


@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES)
def test_stop_rule_never_loses_the_optimum(n_l, n_i, seed, classification_profile):
    t = generate_instance(n_l, n_i, seed=seed)
    with_stop = double_climb(t, classification_profile)
    without = double_climb(t, classification_profile, stop_rule=False)
    assert with_stop.solution.cost == pytest.approx(without.solution.cost)


@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES)
def test_iterations_are_polynomially_bounded(n_l, n_i, seed, classification_profile):
    t = generate_instance(n_l, n_i, seed=seed)
    out = double_climb(t, classification_profile)
    assert out.iterations <= n_l ** 2 * n_i


def test_solution_epochs_are_minimal(classification_profile):
    t = generate_instance(4, 3, seed=9)
    sol = double_climb(t, classification_profile).solution
    sel = sol.selection
    assert sel.epochs == min_epochs(t, sel.ll_edges, sel.il_edges, classification_profile)


def test_threaded_run_matches_serial(classification_profile):
    t = generate_instance(4, 3, seed=2)
    serial = double_climb(t, classification_profile, Settings(threads=1))
    threaded = double_climb(t, classification_profile, Settings(threads=4))
    assert serial.solution.selection == threaded.solution.selection


# ── Traces, re-evaluation and deadlines ───────────────────────────────────────

DEADLINE = LearningProfile(0.6799, 0.4978, 542.1, eps_max=0.95, t_max=250.0)


def _rows_per_degree(trace):
    blocks: dict[int, list] = {}
    for row in trace:
        if row.edge_kind != "SKIP":
            blocks.setdefault(row.d_L, []).append(row)
    return list(blocks.values())


def _interior_peaks(values, tol=1e-9):
    return sum(1 for a, b, c in zip(values, values[1:], values[2:]) if b > a + tol and b > c + tol)


def _same_as_fresh_evaluation(t, profile, settings, solution):
    sel = solution.selection
    fresh = evaluate(t, sel.ll_edges, sel.il_edges, profile, settings,
                     with_time=True, epoch_samples=settings.epoch_samples)
    return fresh == solution.result


@pytest.mark.parametrize("profile", [None, DEADLINE], ids=["no-deadline", "deadline"])
@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES)
def test_double_climb_traces_are_well_formed(n_l, n_i, seed, profile, classification_profile,
                                             fast_settings):
    t = generate_instance(n_l, n_i, seed=seed)
    out = double_climb(t, profile or classification_profile, fast_settings)
    assert [row.step for row in out.trace] == list(range(len(out.trace)))
    for rows in _rows_per_degree(out.trace):
        assert rows[0].edge_kind == "LL"
        assert all(b.g > a.g for a, b in zip(rows, rows[1:]))
        g1 = [row.g1 for row in rows[1:]]
        assert all(b >= a - 1e-9 for a, b in zip(g1, g1[1:]))
        assert _interior_peaks([row.g2 for row in rows]) <= 1


@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES[:4])
def test_returned_solutions_re_evaluate_to_their_results(n_l, n_i, seed, classification_profile,
                                                         fast_settings):
    t = generate_instance(n_l, n_i, seed=seed)
    ev = Evaluator(t, classification_profile, fast_settings)
    outcomes = [
        double_climb(t, classification_profile, fast_settings, ev),
        opt_unif(t, classification_profile, fast_settings, ev),
        genetic(t, classification_profile, GaParams(generations=3, population=10), 0,
                fast_settings, ev),
        brute_force(t, classification_profile, fast_settings, ev),
    ]
    for outcome in outcomes:
        assert outcome.feasible
        assert _same_as_fresh_evaluation(t, classification_profile, fast_settings,
                                         outcome.solution)


def test_optimizers_under_a_deadline():
    t = generate_instance(4, 2, seed=5)
    settings = Settings()
    outcomes = [double_climb(t, DEADLINE, settings), brute_force(t, DEADLINE, settings),
                opt_unif(t, DEADLINE, settings)]
    for outcome in outcomes:
        assert outcome.feasible
        assert outcome.solution.cost == pytest.approx(202.447, abs=1e-3)
        assert outcome.solution.result.time <= DEADLINE.t_max
        assert _same_as_fresh_evaluation(t, DEADLINE, settings, outcome.solution)


@pytest.mark.parametrize("n_l, n_i, seed", [(4, 2, 5), (3, 3, 1), (3, 2, 4)])
def test_binding_deadline_excludes_the_unconstrained_optimum(n_l, n_i, seed,
                                                             classification_profile,
                                                             fast_settings):
    t = generate_instance(n_l, n_i, seed=seed)
    free = brute_force(t, classification_profile, fast_settings).solution
    t_max = 0.9 * free.result.time
    tight = replace(classification_profile, t_max=t_max)

    bf = brute_force(t, tight, fast_settings)
    dc = double_climb(t, tight, fast_settings)
    ou = opt_unif(t, tight, fast_settings)
    assert bf.iterations >= 2 or not bf.feasible
    if not bf.feasible:
        assert not dc.feasible and not ou.feasible
        assert bf.reason == "infeasible: no feasible topology"
        return
    assert bf.solution.selection != free.selection
    assert bf.solution.result.time <= t_max
    assert bf.solution.cost >= free.cost
    for other in (dc, ou):
        if other.feasible:
            assert other.solution.result.time <= t_max
            assert other.solution.cost >= bf.solution.cost - 1e-9


# ── Opt-Unif ──────────────────────────────────────────────────────────────────

def test_uniform_il_takes_the_cheapest_per_node(example_instance_path):
    t = load_instance(example_instance_path)
    assert uniform_il(t, 0) == frozenset()
    assert uniform_il(t, 1) == frozenset({("I2", "L1"), ("I1", "L2"), ("I2", "L3"), ("I1", "L4")})
    assert uniform_il(t, 3) is None


@pytest.mark.parametrize("n_l, n_i, seed", SMALL_INSTANCES[:3])
def test_opt_unif_is_never_cheaper_than_double_climb(n_l, n_i, seed, classification_profile):
    t = generate_instance(n_l, n_i, seed=seed)
    ev = Evaluator(t, classification_profile)
    dc = double_climb(t, classification_profile, evaluator=ev)
    ou = opt_unif(t, classification_profile, evaluator=ev)
    assert ou.feasible
    assert ou.solution.cost >= dc.solution.cost - 1e-9
    assert all(row.edge_kind in ("UNIF", "SKIP") for row in ou.trace)


@pytest.mark.parametrize("n_l, n_i", [(3, 2), (4, 2), (4, 3)])
def test_opt_unif_matches_brute_force_on_symmetric_costs(n_l, n_i, topology_factory,
                                                         classification_profile):
    t = topology_factory(n_l, n_i, rate=20.0, ll_cost=lambda a, b: 0.3,
                         il_cost=lambda i, l: 0.2, l_op_cost=0.5, i_op_cost=0.4)
    ev = Evaluator(t, classification_profile)
    ou = opt_unif(t, classification_profile, evaluator=ev)
    bf = brute_force(t, classification_profile, evaluator=ev)
    assert ou.solution.cost == pytest.approx(bf.solution.cost)


# ── Genetic algorithm ─────────────────────────────────────────────────────────

def test_ga_is_deterministic_per_seed(classification_profile):
    t = generate_instance(3, 2, seed=1)
    params = GaParams(generations=5, population=20)
    ev = Evaluator(t, classification_profile)
    first = ga_inner(t, classification_profile, 2, params, seed=42, evaluator=ev)
    second = ga_inner(t, classification_profile, 2, params, seed=42, evaluator=ev)
    assert first == second


def test_ga_without_generations_keeps_the_best_initial_individual(classification_profile):
    t = generate_instance(3, 2, seed=3)
    params = GaParams(generations=0, population=12)
    ev = Evaluator(t, classification_profile)
    chosen = ga_inner(t, classification_profile, 2, params, seed=7, evaluator=ev)

    rng = np.random.default_rng(7)
    population = rng.integers(0, 2, size=(12, len(t.il_keys))).astype(bool)
    ll = frozenset(t.ll_keys)
    decoded = [frozenset(t.il_keys[j] for j in np.flatnonzero(ind)) for ind in population]
    assert chosen in decoded
    feasible = [ev(ll, il).cost for il in decoded if ev(ll, il).feasible]
    assert ev(ll, chosen).cost == pytest.approx(min(feasible))


def test_ga_finds_the_optimum_with_few_genes(topology_factory, classification_profile):
    t = topology_factory(1, 2, rate=30.0, il_cost=lambda i, l: 0.5)
    ga = genetic(t, classification_profile, GaParams(generations=3), seed=0)
    bf = brute_force(t, classification_profile)
    assert ga.solution.cost == pytest.approx(bf.solution.cost)
    assert ga.trace[0].edge_kind == "GA"


@pytest.mark.parametrize("n_l, n_i, instance_seed", [(3, 3, 1), (4, 2, 2)])
def test_ga_is_close_to_brute_force_for_most_seeds(n_l, n_i, instance_seed,
                                                   classification_profile):
    t = generate_instance(n_l, n_i, seed=instance_seed)
    ev = Evaluator(t, classification_profile)
    optimum = brute_force(t, classification_profile, evaluator=ev).solution.cost
    close = sum(
        genetic(t, classification_profile, GaParams(), seed, evaluator=ev).solution.cost
        <= 1.05 * optimum
        for seed in range(10)
    )
    assert close >= 9


def test_ga_needs_a_regular_graph(topology_factory, classification_profile):
    with pytest.raises(ValueError):
        ga_inner(topology_factory(3, 1), classification_profile, 1)


# ── Brute force ───────────────────────────────────────────────────────────────

def test_brute_force_guard(classification_profile):
    t = generate_instance(4, 5, seed=0)
    with pytest.raises(InstanceTooLargeError) as info:
        brute_force(t, classification_profile, Settings(max_brute_force_states=1000))
    assert info.value.bound == 1000


def test_exhaustive_ll_is_at_least_as_good(classification_profile):
    t = generate_instance(4, 2, seed=6)
    restricted = brute_force(t, classification_profile)
    exhaustive = brute_force(t, classification_profile, exhaustive_ll=True)
    assert exhaustive.solution.cost <= restricted.solution.cost + 1e-9


def test_run_algorithm_dispatch(topology_factory, classification_profile):
    t = topology_factory(3, 1)
    for name in ("double-climb", "opt-unif", "brute-force"):
        assert run_algorithm(name, t, classification_profile).feasible
    with pytest.raises(ValueError):
        run_algorithm("simplex", t, classification_profile)


def test_evaluator_memoises(topology_factory, classification_profile):
    t = topology_factory(3, 1)
    ev = Evaluator(t, classification_profile, Settings(threads=2))
    ll = t.ll_keys
    first = ev(ll, [])
    assert ev(ll, []) is first
    assert ev.stats() == {"calls": 2, "evaluations": 1}
    results = ev.evaluate_many([(ll, []), (ll, t.il_keys), (ll, [])])
    assert results[0] is first and results[2] is first
    assert ev.evaluations == 2
    assert math.isnan(first.time)


# (|L|, |I|, single_homed); the 4 x 4 instances give each I-node one candidate edge.
SWEEP_SHAPES = [(3, 2, False), (4, 2, False), (3, 3, False), (4, 3, False), (3, 4, False),
                (4, 4, True)]


@pytest.mark.slow
def test_competitive_bound_and_dominance_over_many_instances(classification_profile):
    dc_costs, ou_costs = [], []
    for seed in range(204):
        n_l, n_i, single_homed = SWEEP_SHAPES[seed % len(SWEEP_SHAPES)]
        t = generate_instance(n_l, n_i, seed=seed, single_homed=single_homed)
        ev = Evaluator(t, classification_profile)
        dc = double_climb(t, classification_profile, evaluator=ev)
        ou = opt_unif(t, classification_profile, evaluator=ev)
        bf = brute_force(t, classification_profile, evaluator=ev)
        assert bf.solution.cost <= dc.solution.cost + 1e-9
        assert dc.solution.cost <= (1.0 + 1.0 / n_i) * bf.solution.cost + 1e-9
        assert dc.iterations <= n_l ** 2 * n_i
        dc_costs.append(dc.solution.cost)
        ou_costs.append(ou.solution.cost)

    dc_costs, ou_costs = np.array(dc_costs), np.array(ou_costs)
    assert dc_costs.mean() <= ou_costs.mean()
    assert np.mean(dc_costs <= ou_costs + 1e-9) >= 0.9
