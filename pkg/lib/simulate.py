"""
Monte Carlo simulator of the epoch protocol.

Each epoch starts at the previous global barrier: every selected I-L edge
delivers after a draw of its I-node's generation law, an L-node starts
computing once all its deliveries are in, computes for a draw of its base
compute law scaled by X^(k-1)_l / X^0_l, and the epoch ends when the slowest
L-node finishes.

Replications are drawn in blocks of BLOCK_SIZE; block b uses the PCG64
stream seeded by SeedSequence([seed, b]), so the result depends only on
(seed, reps) and never on thread scheduling.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .models import (
    DeterministicSpec,
    DistributionSpec,
    ExponentialSpec,
    GanttEvent,
    GridSpec,
    Selection,
    SimStats,
    Topology,
    UniformSpec,
)
from .stochastic import compute_scale
from .topology import inodes_by_lnode

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1024
MIN_REPS = 100


def draw(spec: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` independent draws from a distribution spec."""
    if isinstance(spec, UniformSpec):
        return rng.uniform(spec.a, spec.b, size)
    if isinstance(spec, ExponentialSpec):
        return rng.exponential(1.0 / spec.rate, size)
    if isinstance(spec, DeterministicSpec):
        return np.full(size, spec.value)
    if isinstance(spec, GridSpec):
        density = np.asarray(spec.density, dtype=float)
        times = spec.t0 + spec.dt * np.arange(density.size)
        cdf = cumulative_trapezoid(density, dx=spec.dt, initial=0.0)
        return np.interp(rng.random(size), cdf / cdf[-1], times)
    raise TypeError(f"unsupported distribution {spec!r}")


def _simulate(
    topology: Topology,
    selection: Selection,
    rng: np.random.Generator,
    n: int,
    shared_draw: bool,
    events: Optional[list[GanttEvent]] = None,
) -> np.ndarray:
    """Epoch durations of `n` replications, shape (n, K)."""
    K = selection.epochs
    feeds = inodes_by_lnode(topology, selection.il_edges)
    used = sorted({i for i, _ in selection.il_edges})
    edges = sorted(selection.il_edges)
    durations = np.empty((n, K))
    start = np.zeros(n)

    for k in range(1, K + 1):
        if shared_draw:
            per_inode = {i: draw(topology.i_by_id[i].gen_time, rng, n) for i in used}
            delivery = {(i, l): per_inode[i] for i, l in edges}
        else:
            delivery = {e: draw(topology.i_by_id[e[0]].gen_time, rng, n) for e in edges}

        finish = np.zeros(n)
        for node in topology.l_nodes:
            ready = np.zeros(n)
            for i in feeds[node.id]:
                ready = np.maximum(ready, delivery[(i, node.id)])
            factor = compute_scale(topology, selection.il_edges, node.id, k)
            compute = draw(node.base_compute, rng, n) * factor
            finish = np.maximum(finish, ready + compute)
            if events is not None:
                events.append(GanttEvent(node.id, "L", k, float(start[0] + ready[0]),
                                         float(start[0] + ready[0] + compute[0])))

        if events is not None:
            if shared_draw:
                bars = [(i, per_inode[i]) for i in used]
            else:
                bars = [(i, delivery[(i, l)]) for i, l in edges]
            for i, d in bars:
                events.append(GanttEvent(i, "I", k, float(start[0]), float(start[0] + d[0])))

        durations[:, k - 1] = finish
        start = start + finish
    return durations


def run_replication(
    topology: Topology,
    selection: Selection,
    seed: int,
    shared_draw: bool = False,
) -> tuple[float, list[GanttEvent]]:
    """One replication: total learning time and the Gantt events of every node."""
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    events: list[GanttEvent] = []
    durations = _simulate(topology, selection, rng, 1, shared_draw, events)
    events.sort(key=lambda e: (e.epoch, e.kind, e.node, e.start))
    return float(durations.sum()), events


def _block(topology: Topology, selection: Selection, seed: int, block: int,
           size: int, shared_draw: bool) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    return _simulate(topology, selection, rng, size, shared_draw)


def monte_carlo(
    topology: Topology,
    selection: Selection,
    reps: int,
    seed: int,
    shared_draw: bool = False,
    threads: int = 1,
) -> SimStats:
    """Mean learning time (and per-epoch means) over `reps` replications."""
    if reps < MIN_REPS:
        raise ValueError(f"monte_carlo needs reps >= {MIN_REPS}, got {reps}")

    sizes: Sequence[int] = [min(BLOCK_SIZE, reps - b * BLOCK_SIZE)
                            for b in range(math.ceil(reps / BLOCK_SIZE))]

    def run(b: int) -> np.ndarray:
        return _block(topology, selection, seed, b, sizes[b], shared_draw)

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(len(sizes))))
    else:
        blocks = [run(b) for b in range(len(sizes))]

    durations = np.vstack(blocks)
    totals = durations.sum(axis=1)
    root = math.sqrt(reps)
    stats = SimStats(
        epoch_means=tuple(float(v) for v in durations.mean(axis=0)),
        epoch_std_errors=tuple(float(v) for v in durations.std(axis=0, ddof=1) / root),
        total_mean=float(totals.mean()),
        std_error=float(totals.std(ddof=1) / root),
        reps=reps,
        seed=seed,
        shared_draw=shared_draw,
    )
    logger.info("Monte Carlo: %d reps, mean %.6g +/- %.3g", reps, stats.total_mean, stats.std_error)
    return stats
