"""
Random instances shaped like the reference scenario, and rate multipliers.

    edge costs      ~ U(0, 1), complete L-L and I-L candidate sets
    I-node rates    ~ U(10, 100) samples per epoch, times `multiplier`
    gen / compute   exponential with mean 1
    node op-costs   0

Draws happen in a fixed order (L-L costs, I-L costs, rates, homing) so the
multiplier changes nothing but the rates.
"""
from __future__ import annotations

import logging
from dataclasses import replace
from itertools import combinations

import numpy as np

from .models import CandidateEdge, ExponentialSpec, INode, LNode, Topology
from .topology import validate_topology

logger = logging.getLogger(__name__)

RICH_MULTIPLIER = 5.0
RATE_RANGE = (10.0, 100.0)


def generate_instance(
    n_l: int,
    n_i: int,
    seed: int = 0,
    multiplier: float = 1.0,
    single_homed: bool = False,
    initial_samples: float = 100.0,
) -> Topology:
    """Random instance; deterministic for a given argument tuple."""
    if n_l < 1 or n_i < 0:
        raise ValueError(f"need |L| >= 1 and |I| >= 0, got ({n_l}, {n_i})")
    if not (multiplier > 0.0):
        raise ValueError(f"multiplier must be > 0, got {multiplier}")
    if not (initial_samples > 0.0):
        raise ValueError(f"initial_samples must be > 0, got {initial_samples}")

    rng = np.random.default_rng(seed)
    l_ids = [f"L{j}" for j in range(1, n_l + 1)]
    i_ids = [f"I{j}" for j in range(1, n_i + 1)]

    ll_pairs = list(combinations(l_ids, 2))
    ll_costs = rng.uniform(0.0, 1.0, len(ll_pairs))
    il_pairs = [(i, l) for i in i_ids for l in l_ids]
    il_costs = rng.uniform(0.0, 1.0, len(il_pairs))
    rates = rng.uniform(*RATE_RANGE, n_i)
    homes = rng.integers(0, n_l, n_i)

    unit = ExponentialSpec(1.0)
    l_nodes = tuple(LNode(l, 0.0, unit, initial_samples) for l in l_ids)
    i_nodes = tuple(INode(i, 0.0, unit, float(r) * multiplier) for i, r in zip(i_ids, rates))
    ll = tuple(CandidateEdge.ll(a, b, float(c)) for (a, b), c in zip(ll_pairs, ll_costs))
    home_of = {i: l_ids[h] for i, h in zip(i_ids, homes)}
    il = tuple(
        CandidateEdge.il(i, l, float(c))
        for (i, l), c in zip(il_pairs, il_costs)
        if not single_homed or home_of[i] == l
    )
    logger.debug("Generated instance |L|=%d |I|=%d seed=%d x%.3g", n_l, n_i, seed, multiplier)
    return validate_topology(Topology(l_nodes, i_nodes, ll, il))


def with_rate_multiplier(topology: Topology, multiplier: float) -> Topology:
    """Same instance with every I-node rate multiplied."""
    if not (multiplier > 0.0):
        raise ValueError(f"multiplier must be > 0, got {multiplier}")
    if multiplier == 1.0:
        return topology
    i_nodes = tuple(replace(i, rate=i.rate * multiplier) for i in topology.i_nodes)
    return replace(topology, i_nodes=i_nodes)
