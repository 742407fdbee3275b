"""
End-to-end evaluation of a selection: error law, epoch count, cost, time.

    eps^K = c1 + c2 * ln(c3 + X) / sqrt(K * gamma)
    C     = sum_l c_l + sum_{l-l'} c_ll' + sum_{i->l} c_il + sum_{used i} c_i
    C^K   = K * C
    g     = min(eps_max / eps^K, T_max / T^K), feasible iff g >= 1

K is always the smallest error-feasible epoch count: cost is linear in K.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from typing import Optional

from .config import Settings
from .errors import ConfigurationError, DisconnectedGraphError
from .models import EdgeKey, EvaluationResult, LearningProfile, Selection, Topology
from .stochastic import expected_learning_time
from .topology import average_dataset_size, spectral_gap

logger = logging.getLogger(__name__)

# Epoch counts below this are checked one by one before the doubling search.
LINEAR_WINDOW = 32


def predicted_error(K: float, gamma: float, X: float, profile: LearningProfile) -> float:
    """Error law with the natural logarithm."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if gamma <= 0.0:
        raise DisconnectedGraphError(
            f"disconnected cooperation graph (gamma = {gamma}): error is unbounded"
        )
    arg = profile.c3 + X
    if arg <= 0.0:
        raise ConfigurationError(f"log argument c3 + X = {arg} must be > 0")
    return profile.c1 + profile.c2 * math.log(arg) / math.sqrt(K * gamma)


def min_epochs(
    topology: Topology,
    ll_edges: Iterable[EdgeKey],
    il_edges: Iterable[EdgeKey],
    profile: LearningProfile,
    k_cap: int = 1_000_000,
    gamma: Optional[float] = None,
) -> Optional[int]:
    """
    Smallest K >= 1 with eps(K, gamma, X(K)) <= eps_max, or None if infeasible.

    Epochs up to LINEAR_WINDOW are scanned; beyond that a doubling search
    brackets the answer and a binary search pins it down.
    """
    il_edges = frozenset(il_edges)
    if gamma is None:
        gamma = spectral_gap(topology, ll_edges)
    if gamma <= 0.0 or profile.below_error_floor:
        return None

    def ok(K: int) -> bool:
        X = average_dataset_size(topology, il_edges, K)
        return predicted_error(K, gamma, X, profile) <= profile.eps_max

    for K in range(1, min(LINEAR_WINDOW, k_cap) + 1):
        if ok(K):
            return K
    if k_cap <= LINEAR_WINDOW:
        return None

    lo, hi = LINEAR_WINDOW, 2 * LINEAR_WINDOW
    while not ok(min(hi, k_cap)):
        if hi >= k_cap:
            return None
        lo, hi = hi, 2 * hi
    hi = min(hi, k_cap)

    # ok(lo) is False, ok(hi) is True.
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def per_epoch_cost(
    topology: Topology,
    ll_edges: Iterable[EdgeKey],
    il_edges: Iterable[EdgeKey],
) -> float:
    """Per-epoch cost C; every L-node is charged, an I-node only when used."""
    il_edges = list(il_edges)
    cost = sum(l.op_cost for l in topology.l_nodes)
    cost += sum(topology.ll_cost[e] for e in ll_edges)
    cost += sum(topology.il_cost[e] for e in il_edges)
    cost += sum(topology.i_by_id[i].op_cost for i in {i for i, _ in il_edges})
    return cost


def total_cost(topology: Topology, selection: Optional[Selection]) -> float:
    """C^K = K * C; the empty solution (None) costs +inf."""
    if selection is None:
        return math.inf
    return selection.epochs * per_epoch_cost(topology, selection.ll_edges, selection.il_edges)


def evaluate(
    topology: Topology,
    ll_edges: Iterable[EdgeKey],
    il_edges: Iterable[EdgeKey],
    profile: LearningProfile,
    settings: Optional[Settings] = None,
    with_time: bool = False,
    epoch_samples: Optional[int] = None,
) -> EvaluationResult:
    """
    Evaluate one selection.

    T^K is computed when the deadline is finite or `with_time` is set;
    otherwise time is NaN and g2 is +inf. An error-infeasible selection
    reports K_cap epochs, infinite time and margin eps_max / eps^(K_cap).
    """
    settings = settings or Settings()
    ll_edges = frozenset(ll_edges)
    il_edges = frozenset(il_edges)

    gamma = spectral_gap(topology, ll_edges)
    per_epoch = per_epoch_cost(topology, ll_edges, il_edges)
    K = min_epochs(topology, ll_edges, il_edges, profile, settings.k_cap, gamma=gamma)

    if K is None:
        K = settings.k_cap
        X = average_dataset_size(topology, il_edges, K)
        error = predicted_error(K, gamma, X, profile) if gamma > 0.0 else math.inf
        g1 = profile.eps_max / error if error > 0.0 else math.inf
        return EvaluationResult(
            error=error, time=math.inf, cost=K * per_epoch, per_epoch_cost=per_epoch,
            epochs=K, feasible=False, margin=g1, g1=g1, g2=math.nan,
            gamma=gamma, avg_samples=X,
        )

    X = average_dataset_size(topology, il_edges, K)
    error = predicted_error(K, gamma, X, profile)
    g1 = profile.eps_max / error if error > 0.0 else math.inf

    if with_time or math.isfinite(profile.t_max):
        time = expected_learning_time(
            topology, Selection(ll_edges, il_edges, K),
            resolution=settings.grid_resolution,
            quantile_cut=settings.quantile_cut,
            epoch_samples=epoch_samples,
        )
        g2 = profile.t_max / time if time > 0.0 else math.inf
    else:
        time, g2 = math.nan, math.inf

    margin = min(g1, g2)
    return EvaluationResult(
        error=error, time=time, cost=K * per_epoch, per_epoch_cost=per_epoch,
        epochs=K, feasible=margin >= 1.0, margin=margin, g1=g1, g2=g2,
        gamma=gamma, avg_samples=X,
    )
