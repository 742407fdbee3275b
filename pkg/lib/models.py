"""
Typed data models for instances, selections, evaluations and run artefacts.

All classes are frozen dataclasses with no third-party dependencies, safe to
import anywhere and to share between threads. Business logic lives in the
operation modules (topology, stochastic, learning, optimize, simulate), not
here; models only check the invariants of their own fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import ClassVar, Optional, Union

from .errors import DistributionError

# An L-L edge is an unordered pair stored sorted; an I-L edge is (i_id, l_id).
EdgeKey = tuple[str, str]


def ll_key(a: str, b: str) -> EdgeKey:
    """Canonical key of the unordered L-L pair {a, b}."""
    return (a, b) if a <= b else (b, a)


def edge_label(key: EdgeKey, kind: str) -> str:
    return f"{key[0]}->{key[1]}" if kind == "il" else f"{key[0]}-{key[1]}"


# ── Distributions ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class UniformSpec:
    """Uniform law on [a, b] with 0 <= a < b."""

    a: float
    b: float
    kind: ClassVar[str] = "uniform"

    def __post_init__(self) -> None:
        if not (0.0 <= self.a < self.b) or not math.isfinite(self.b):
            raise DistributionError(f"uniform needs 0 <= a < b, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def scaled(self, factor: float) -> "UniformSpec":
        return UniformSpec(self.a * factor, self.b * factor)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ExponentialSpec:
    """Exponential law with rate lambda > 0."""

    rate: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self) -> None:
        if not (self.rate > 0.0) or not math.isfinite(self.rate):
            raise DistributionError(f"exponential rate must be > 0, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def scaled(self, factor: float) -> "ExponentialSpec":
        return ExponentialSpec(self.rate / factor)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class GridSpec:
    """Numeric pdf sampled at t0 + j*dt, integrating to 1 (trapezoid rule)."""

    t0: float
    dt: float
    density: tuple[float, ...]
    kind: ClassVar[str] = "grid"

    def __post_init__(self) -> None:
        if self.t0 < 0.0 or not (self.dt > 0.0) or len(self.density) < 2:
            raise DistributionError("grid needs t0 >= 0, dt > 0 and >= 2 density values")
        if any(v < 0.0 or not math.isfinite(v) for v in self.density):
            raise DistributionError("grid density must be finite and nonnegative")
        mass = self.dt * (sum(self.density) - 0.5 * (self.density[0] + self.density[-1]))
        if abs(mass - 1.0) > 1e-6:
            raise DistributionError(f"grid density integrates to {mass:.9f}, expected 1")

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self.density) - 1)

    @property
    def mean(self) -> float:
        d = self.density
        ts = [self.t0 + j * self.dt for j in range(len(d))]
        body = sum(t * v for t, v in zip(ts, d))
        return self.dt * (body - 0.5 * (ts[0] * d[0] + ts[-1] * d[-1]))

    def scaled(self, factor: float) -> "GridSpec":
        return GridSpec(self.t0 * factor, self.dt * factor,
                        tuple(v / factor for v in self.density))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "t0": self.t0, "dt": self.dt,
                "density": list(self.density)}


@dataclass(frozen=True)
class DeterministicSpec:
    """Point mass at `value` >= 0."""

    value: float
    kind: ClassVar[str] = "deterministic"

    def __post_init__(self) -> None:
        if self.value < 0.0 or not math.isfinite(self.value):
            raise DistributionError(f"deterministic value must be >= 0, got {self.value}")

    @property
    def mean(self) -> float:
        return self.value

    def scaled(self, factor: float) -> "DeterministicSpec":
        return DeterministicSpec(self.value * factor)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}


DistributionSpec = Union[UniformSpec, ExponentialSpec, GridSpec, DeterministicSpec]


# ── Instance ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LNode:
    """A learning node: computes gradients, exchanges them with neighbours."""

    id: str
    op_cost: float
    base_compute: DistributionSpec
    initial_samples: float


@dataclass(frozen=True)
class INode:
    """An information node: delivers fresh samples to connected L-nodes."""

    id: str
    op_cost: float
    gen_time: DistributionSpec
    rate: float


@dataclass(frozen=True)
class CandidateEdge:
    """A selectable logical link with its per-epoch communication cost."""

    endpoints: EdgeKey
    comm_cost: float
    kind: str               # 'll' | 'il'

    @classmethod
    def ll(cls, a: str, b: str, cost: float) -> "CandidateEdge":
        return cls(ll_key(a, b), cost, "ll")

    @classmethod
    def il(cls, i: str, l: str, cost: float) -> "CandidateEdge":
        return cls((i, l), cost, "il")

    @property
    def key(self) -> EdgeKey:
        return self.endpoints

    @property
    def label(self) -> str:
        return edge_label(self.endpoints, self.kind)


@dataclass(frozen=True)
class Topology:
    """Problem instance: node sets plus candidate L-L and I-L edges."""

    l_nodes: tuple[LNode, ...]
    i_nodes: tuple[INode, ...]
    ll_candidates: tuple[CandidateEdge, ...] = ()
    il_candidates: tuple[CandidateEdge, ...] = ()

    @cached_property
    def l_ids(self) -> list[str]:
        return [n.id for n in self.l_nodes]

    @cached_property
    def i_ids(self) -> list[str]:
        return [n.id for n in self.i_nodes]

    @cached_property
    def l_by_id(self) -> dict[str, LNode]:
        return {n.id: n for n in self.l_nodes}

    @cached_property
    def i_by_id(self) -> dict[str, INode]:
        return {n.id: n for n in self.i_nodes}

    @cached_property
    def ll_cost(self) -> dict[EdgeKey, float]:
        return {e.key: e.comm_cost for e in self.ll_candidates}

    @cached_property
    def il_cost(self) -> dict[EdgeKey, float]:
        return {e.key: e.comm_cost for e in self.il_candidates}

    @cached_property
    def ll_keys(self) -> list[EdgeKey]:
        """Sorted L-L candidate keys (deterministic iteration order)."""
        return sorted(self.ll_cost)

    @cached_property
    def il_keys(self) -> list[EdgeKey]:
        """Sorted I-L candidate keys (also the GA gene order)."""
        return sorted(self.il_cost)


@dataclass(frozen=True)
class Selection:
    """Chosen L-L edges (matrix P), I-L edges (matrix Q) and epoch count K."""

    ll_edges: frozenset[EdgeKey]
    il_edges: frozenset[EdgeKey]
    epochs: int = 1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


# ── Learning ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LearningProfile:
    """Error-law coefficients plus the error target and the deadline."""

    c1: float
    c2: float
    c3: float
    eps_max: float
    t_max: float = math.inf

    def __post_init__(self) -> None:
        if not (self.c2 >= 0.0):
            raise ValueError(f"c2 must be >= 0, got {self.c2}")
        if not math.isfinite(self.c3):
            raise ValueError(f"c3 must be finite, got {self.c3}")
        if not (0.0 < self.eps_max <= 1.0):
            raise ValueError(f"eps_max must lie in (0, 1], got {self.eps_max}")
        if not (self.t_max > 0.0):
            raise ValueError(f"t_max must be > 0, got {self.t_max}")

    @property
    def below_error_floor(self) -> bool:
        """True when no K reaches eps_max; a flat law (c2 = 0) sits exactly at c1."""
        if self.c2 == 0.0:
            return self.eps_max < self.c1
        return self.eps_max <= self.c1


@dataclass(frozen=True)
class EvaluationResult:
    """Everything the constraint and the objective need for one selection."""

    error: float            # eps^K
    time: float             # T^K (nan when not computed)
    cost: float             # C^K = epochs * per_epoch_cost
    per_epoch_cost: float   # C
    epochs: int             # K
    feasible: bool
    margin: float           # g = min(g1, g2)
    g1: float
    g2: float
    gamma: float = math.nan
    avg_samples: float = math.nan

    @property
    def error_feasible(self) -> bool:
        return self.g1 >= 1.0


@dataclass(frozen=True)
class ProfileObservation:
    """One profiling measurement of the error law."""

    X: float
    K: float
    gamma: float
    error: float


@dataclass(frozen=True)
class ProfileFit:
    c1: float
    c2: float
    c3: float
    mse: float
    observations: int


# ── Optimization ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Solution:
    """A selection together with its evaluation."""

    selection: Selection
    result: EvaluationResult

    @property
    def feasible(self) -> bool:
        return self.result.feasible

    @property
    def cost(self) -> float:
        return self.result.cost


@dataclass(frozen=True)
class TraceEntry:
    """One row of an optimizer trace (plot-ready)."""

    step: int
    d_L: int
    edge_kind: str          # 'LL' | 'IL' | 'UNIF' | 'GA' | 'BF' | 'SKIP'
    edge_id: str
    cost: float
    g: float
    g1: float
    g2: float
    feasible: bool

    FIELDS: ClassVar[tuple[str, ...]] = (
        "step", "d_L", "edge_kind", "edge_id", "cost", "g", "g1", "g2", "feasible",
    )


@dataclass(frozen=True)
class GaParams:
    """Genetic-algorithm knobs; the defaults are the reference settings."""

    generations: int = 50
    population: int = 100
    parents_mating: int = 4
    mutation_prob: float = 0.15
    crossover: str = "single_point"

    def __post_init__(self) -> None:
        if self.generations < 0 or self.population < 2:
            raise ValueError("GA needs generations >= 0 and population >= 2")
        if not (2 <= self.parents_mating <= self.population):
            raise ValueError("parents_mating must lie in [2, population]")
        if not (0.0 <= self.mutation_prob <= 1.0):
            raise ValueError("mutation_prob must lie in [0, 1]")
        if self.crossover != "single_point":
            raise ValueError(f"unsupported crossover {self.crossover!r}")


@dataclass
class OptimizationOutcome:
    """Result of an optimizer run: best solution (None = infeasible) + trace."""

    algorithm: str
    solution: Optional[Solution]
    trace: list[TraceEntry] = field(default_factory=list)
    iterations: int = 0
    evaluations: int = 0
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.solution is not None and self.solution.feasible


# ── Simulation ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GanttEvent:
    """One activity bar of a node within an epoch."""

    node: str
    kind: str               # 'I' | 'L'
    epoch: int
    start: float
    end: float

    FIELDS: ClassVar[tuple[str, ...]] = ("node", "kind", "epoch", "start", "end")


@dataclass(frozen=True)
class SimStats:
    """Monte Carlo summary of the learning time."""

    epoch_means: tuple[float, ...]
    epoch_std_errors: tuple[float, ...]
    total_mean: float
    std_error: float
    reps: int
    seed: int
    shared_draw: bool = False


# ── Commands ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class RunConfig:
    """Resolved command-line configuration."""

    instance: Optional[Path] = None
    profile: Optional[Path] = None
    coefficients: Optional[tuple[float, float, float]] = None
    observations: Optional[Path] = None
    eps_max: Optional[float] = None
    t_max: Optional[float] = None
    algorithm: str = "double-climb"
    seed: int = 0
    reps: int = 10_000
    out_dir: Path = Path(".")
    multiplier: float = 1.0

    def __post_init__(self) -> None:
        sources = [self.profile, self.coefficients, self.observations]
        if sum(s is not None for s in sources) != 1:
            raise ValueError("give exactly one profile source")
        if not (self.multiplier > 0.0):
            raise ValueError(f"multiplier must be > 0, got {self.multiplier}")
