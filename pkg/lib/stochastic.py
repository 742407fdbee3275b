"""
Grid engine for learning-time laws.

Every pdf is a GridFunction sampled at t0 + j*dt and integrated with the
trapezoid rule. Maxima of independent variables are built from products of
CDFs, sums from (trapezoid-corrected) convolutions; grids of different steps
are reconciled by resampling cell averages of the CDF, which preserves mass.

The per-epoch pipeline for a selection is:
    compute law of l, scaled by X^(k-1)_l / X^0_l
      * (max over the I-nodes feeding l)        -> h^k_l
    max over all L-nodes of the h^k_l           -> h^k
and the expected learning time is the sum of the means of h^1 .. h^K.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.signal import fftconvolve

from .errors import ConfigurationError
from .models import (
    DeterministicSpec,
    DistributionSpec,
    ExponentialSpec,
    GridSpec,
    Selection,
    Topology,
    UniformSpec,
)
from .topology import inodes_by_lnode, samples_at

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 4096
DEFAULT_QUANTILE_CUT = 1.0 - 1e-9
MIN_RESOLUTION = 64

# Derived grids hold at most this many points per unit of resolution.
_MAX_POINTS_FACTOR = 4
# Relative width of the box standing in for a point mass.
_POINT_MASS_WIDTH = 1e-6


# ── GridFunction ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function of time sampled at t0 + j*dt."""

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if not (self.dt > 0.0):
            raise ValueError(f"grid step must be > 0, got {self.dt}")
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("grid needs a 1-D array of at least 2 values")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.n - 1)

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.dt))

    def cumulative(self) -> np.ndarray:
        return cumulative_trapezoid(self.values, dx=self.dt, initial=0.0)

    def cdf_at(self, t: np.ndarray) -> np.ndarray:
        cum = self.cumulative()
        return np.interp(t, self.times, cum, left=0.0, right=cum[-1])

    def normalized(self) -> "GridFunction":
        """Clamp numerical noise below zero and rescale to unit mass."""
        values = np.clip(self.values, 0.0, None)
        mass = float(trapezoid(values, dx=self.dt))
        if not (mass > 0.0):
            raise ValueError("cannot normalise a grid with zero mass")
        return GridFunction(self.t0, self.dt, values / mass)

    @property
    def mean(self) -> float:
        return expectation(self)


# ── Discretisation ────────────────────────────────────────────────────────────

def to_grid(
    d: DistributionSpec,
    resolution: int = DEFAULT_RESOLUTION,
    quantile_cut: float = DEFAULT_QUANTILE_CUT,
) -> GridFunction:
    """Sample a distribution's pdf on `resolution` points over its (cut) support."""
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")

    if isinstance(d, UniformSpec):
        ts = np.linspace(d.a, d.b, resolution)
        return GridFunction(d.a, float(ts[1] - ts[0]),
                            np.full(resolution, 1.0 / (d.b - d.a)))

    if isinstance(d, ExponentialSpec):
        scale = 1.0 / d.rate
        hi = float(stats.expon.ppf(quantile_cut, scale=scale))
        ts = np.linspace(0.0, hi, resolution)
        return GridFunction(0.0, float(ts[1]), stats.expon.pdf(ts, scale=scale)).normalized()

    if isinstance(d, GridSpec):
        src = GridFunction(d.t0, d.dt, np.asarray(d.density, dtype=float))
        ts = np.linspace(src.t0, src.t_end, resolution)
        return GridFunction(src.t0, float(ts[1] - ts[0]),
                            np.interp(ts, src.times, src.values)).normalized()

    if isinstance(d, DeterministicSpec):
        width = max(d.value, 1.0) * _POINT_MASS_WIDTH
        return to_grid(UniformSpec(d.value, d.value + width), resolution)

    raise TypeError(f"unsupported distribution {d!r}")


def _as_grid(d: Union[DistributionSpec, GridFunction], resolution: int,
             quantile_cut: float) -> GridFunction:
    return d if isinstance(d, GridFunction) else to_grid(d, resolution, quantile_cut)


def _resample(g: GridFunction, dt: float) -> GridFunction:
    """Cell averages of g's CDF on a grid of step dt starting at g.t0."""
    n = int(math.ceil((g.t_end - g.t0) / dt - 1e-9)) + 1
    n = max(n, 2)
    ts = g.t0 + dt * np.arange(n)
    # End cells are half cells, matching their trapezoid weight.
    lo = np.maximum(ts - 0.5 * dt, ts[0])
    hi = np.minimum(ts + 0.5 * dt, ts[-1])
    values = (g.cdf_at(hi) - g.cdf_at(lo)) / (hi - lo)
    return GridFunction(g.t0, dt, values).normalized()


def _common_step(grids: Sequence[GridFunction], span: float, resolution: int) -> float:
    floor = span / (resolution * _MAX_POINTS_FACTOR - 1)
    return max(min(g.dt for g in grids), floor)


# ── Order statistics and sums ─────────────────────────────────────────────────

def _max_of_grids(grids: Sequence[GridFunction], resolution: int) -> GridFunction:
    if len(grids) == 1:
        return grids[0].normalized()
    t0 = min(g.t0 for g in grids)
    t_end = max(g.t_end for g in grids)
    dt = _common_step(grids, t_end - t0, resolution)
    n = int(math.ceil((t_end - t0) / dt - 1e-9)) + 1
    ts = t0 + dt * np.arange(n)

    product = np.ones(n)
    for g in grids:
        product *= np.clip(g.cdf_at(ts), 0.0, 1.0)
    return GridFunction(t0, dt, np.gradient(product, dt)).normalized()


def max_of_independent(
    dists: Sequence[Union[DistributionSpec, GridFunction]],
    resolution: int = DEFAULT_RESOLUTION,
    quantile_cut: float = DEFAULT_QUANTILE_CUT,
) -> GridFunction:
    """Pdf of the maximum: d/dt of the product of the individual CDFs."""
    if not dists:
        raise ValueError("max_of_independent needs at least one distribution")
    return _max_of_grids([_as_grid(d, resolution, quantile_cut) for d in dists], resolution)


def convolve(p1: GridFunction, p2: GridFunction,
             resolution: int = DEFAULT_RESOLUTION) -> GridFunction:
    """Pdf of the sum of two independent variables."""
    span = (p1.t_end - p1.t0) + (p2.t_end - p2.t0)
    dt = _common_step((p1, p2), span, resolution)
    a = p1 if math.isclose(p1.dt, dt, rel_tol=1e-12) else _resample(p1, dt)
    b = p2 if math.isclose(p2.dt, dt, rel_tol=1e-12) else _resample(p2, dt)
    av, bv = a.values, b.values

    full = fftconvolve(av, bv) * dt
    # Rectangle sums -> trapezoid rule over each overlap window.
    k = np.arange(full.size)
    lo = np.maximum(0, k - (bv.size - 1))
    hi = np.minimum(k, av.size - 1)
    full -= 0.5 * dt * (av[lo] * bv[k - lo] + av[hi] * bv[k - hi])
    return GridFunction(a.t0 + b.t0, dt, full).normalized()


def expectation(p: GridFunction) -> float:
    """Trapezoid-rule integral of t * p(t)."""
    return float(trapezoid(p.times * p.values, dx=p.dt))


# ── Epoch pipeline ────────────────────────────────────────────────────────────

def compute_scale(topology: Topology, il_edges, l: str, k: int) -> float:
    """Factor X^(k-1)_l / X^0_l applied to the compute duration of epoch k."""
    x0 = topology.l_by_id[l].initial_samples
    if x0 <= 0.0:
        raise ConfigurationError(
            f"L-node {l!r} has X^0 = {x0}: compute-time scaling X^k/X^0 is undefined"
        )
    return samples_at(topology, il_edges, l, k - 1) / x0


def _node_pdf(key: tuple, resolution: int, quantile_cut: float,
              cache: dict) -> GridFunction:
    hit = cache.get(key)
    if hit is not None:
        return hit
    compute_spec, gen_specs = key
    h = to_grid(compute_spec, resolution, quantile_cut)
    if gen_specs:
        slowest = max_of_independent(gen_specs, resolution, quantile_cut)
        h = convolve(h, slowest, resolution)
    cache[key] = h
    return h


def _node_keys(topology: Topology, selection: Selection, k: int) -> tuple:
    feeds = inodes_by_lnode(topology, selection.il_edges)
    keys = []
    for l in topology.l_nodes:
        factor = compute_scale(topology, selection.il_edges, l.id, k)
        compute = l.base_compute if factor == 1.0 else l.base_compute.scaled(factor)
        gens = tuple(sorted((topology.i_by_id[i].gen_time for i in feeds[l.id]), key=repr))
        keys.append((compute, gens))
    return tuple(keys)


def epoch_duration_pdf(
    topology: Topology,
    selection: Selection,
    k: int,
    resolution: int = DEFAULT_RESOLUTION,
    quantile_cut: float = DEFAULT_QUANTILE_CUT,
    cache: Optional[dict] = None,
) -> GridFunction:
    """Pdf h^k of the duration of epoch k (global barrier over all L-nodes)."""
    if k < 1:
        raise ValueError(f"epoch index must be >= 1, got {k}")
    cache = {} if cache is None else cache
    keys = _node_keys(topology, selection, k)
    nodes = [_node_pdf(key, resolution, quantile_cut, cache) for key in keys]
    return _max_of_grids(nodes, resolution)


def epoch_means(
    topology: Topology,
    selection: Selection,
    resolution: int = DEFAULT_RESOLUTION,
    quantile_cut: float = DEFAULT_QUANTILE_CUT,
    epoch_samples: Optional[int] = None,
) -> np.ndarray:
    """
    Expected duration of each epoch 1..K.

    With `epoch_samples` set and K larger, only that many evenly spread epochs
    go through the grid engine and the rest are linearly interpolated.
    """
    K = selection.epochs
    if epoch_samples and K > epoch_samples:
        ks = np.unique(np.rint(np.linspace(1, K, epoch_samples)).astype(int))
    else:
        ks = np.arange(1, K + 1)

    node_cache: dict = {}
    by_key: dict[tuple, float] = {}
    sampled = np.empty(ks.size)
    for j, k in enumerate(ks):
        key = _node_keys(topology, selection, int(k))
        if key not in by_key:
            nodes = [_node_pdf(nk, resolution, quantile_cut, node_cache) for nk in key]
            by_key[key] = expectation(_max_of_grids(nodes, resolution))
        sampled[j] = by_key[key]

    logger.debug("Epoch means: %d epochs, %d grid evaluations", K, len(by_key))
    if ks.size == K:
        return sampled
    return np.interp(np.arange(1, K + 1), ks, sampled)


def expected_learning_time(
    topology: Topology,
    selection: Selection,
    resolution: int = DEFAULT_RESOLUTION,
    quantile_cut: float = DEFAULT_QUANTILE_CUT,
    epoch_samples: Optional[int] = None,
) -> float:
    """T^K: sum over epochs of the expected epoch duration."""
    if selection.epochs < 1:
        raise ValueError("selection needs at least one epoch")
    return float(np.sum(epoch_means(topology, selection, resolution,
                                    quantile_cut, epoch_samples)))
