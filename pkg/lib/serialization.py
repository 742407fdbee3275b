"""
File formats: instance/profile/solution JSON, observation/trace/Gantt CSV.

Instance JSON (format_version 1):
    {
      "format_version": 1,
      "l_nodes": [{"id", "op_cost", "base_compute": <dist>, "initial_samples"}],
      "i_nodes": [{"id", "op_cost", "gen_time": <dist>, "rate"}],
      "ll_edges": [{"a", "b", "cost"}],
      "il_edges": [{"i", "l", "cost"}]
    }
    <dist> = {"kind": "uniform", "a", "b"} | {"kind": "exponential", "rate"}
           | {"kind": "grid", "t0", "dt", "density": [...]}
           | {"kind": "deterministic", "value"}

Profile JSON: {"c1", "c2", "c3", "eps_max", "t_max"}; t_max null means no deadline.
Every parse error is an InstanceFormatError naming the line/column or the
field path (e.g. "l_nodes[2].base_compute.rate").
"""
from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Optional

from .errors import DistributionError, InstanceFormatError, TopologyError
from .models import (
    CandidateEdge,
    DeterministicSpec,
    DistributionSpec,
    ExponentialSpec,
    GanttEvent,
    GridSpec,
    INode,
    LearningProfile,
    LNode,
    OptimizationOutcome,
    ProfileFit,
    ProfileObservation,
    RunConfig,
    Selection,
    SimStats,
    Topology,
    TraceEntry,
    UniformSpec,
    ll_key,
)
from .profiling import fit_profile
from .topology import validate_topology

FORMAT_VERSION = 1
OBSERVATION_FIELDS = ("X", "K", "gamma", "error")


# ── JSON helpers ──────────────────────────────────────────────────────────────

def _finite(x: float) -> Optional[float]:
    return x if isinstance(x, (int, float)) and math.isfinite(x) else None


def read_json(path: Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def _field(obj: Any, key: str, where: str, kind: type = float) -> Any:
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{where}: expected an object")
    if key not in obj:
        raise InstanceFormatError(f"{where}.{key}: missing field")
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InstanceFormatError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise InstanceFormatError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _list(data: dict, key: str, required: bool = True) -> list:
    if key not in data:
        if required:
            raise InstanceFormatError(f"{key}: missing field")
        return []
    if not isinstance(data[key], list):
        raise InstanceFormatError(f"{key}: expected a list")
    return data[key]


# ── Distributions ─────────────────────────────────────────────────────────────

def distribution_from_dict(obj: Any, where: str) -> DistributionSpec:
    kind = _field(obj, "kind", where, str)
    try:
        if kind == "uniform":
            return UniformSpec(_field(obj, "a", where), _field(obj, "b", where))
        if kind == "exponential":
            return ExponentialSpec(_field(obj, "rate", where))
        if kind == "grid":
            density = _field(obj, "density", where, list)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in density):
                raise InstanceFormatError(f"{where}.density: expected a list of numbers")
            return GridSpec(_field(obj, "t0", where), _field(obj, "dt", where),
                            tuple(float(v) for v in density))
        if kind == "deterministic":
            return DeterministicSpec(_field(obj, "value", where))
    except DistributionError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc
    raise InstanceFormatError(f"{where}.kind: unknown distribution kind {kind!r}")


# ── Instances ─────────────────────────────────────────────────────────────────

def instance_from_dict(data: Any) -> Topology:
    """Parse and validate an instance document."""
    if not isinstance(data, dict):
        raise InstanceFormatError("instance: expected a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise InstanceFormatError(
            f"format_version: expected {FORMAT_VERSION}, got {version!r}"
        )

    l_nodes = []
    for j, obj in enumerate(_list(data, "l_nodes")):
        where = f"l_nodes[{j}]"
        l_nodes.append(LNode(
            id=_field(obj, "id", where, str),
            op_cost=_field(obj, "op_cost", where),
            base_compute=distribution_from_dict(_field(obj, "base_compute", where, dict),
                                                f"{where}.base_compute"),
            initial_samples=_field(obj, "initial_samples", where),
        ))
    i_nodes = []
    for j, obj in enumerate(_list(data, "i_nodes", required=False)):
        where = f"i_nodes[{j}]"
        i_nodes.append(INode(
            id=_field(obj, "id", where, str),
            op_cost=_field(obj, "op_cost", where),
            gen_time=distribution_from_dict(_field(obj, "gen_time", where, dict),
                                            f"{where}.gen_time"),
            rate=_field(obj, "rate", where),
        ))
    ll = []
    for j, obj in enumerate(_list(data, "ll_edges", required=False)):
        where = f"ll_edges[{j}]"
        a, b = _field(obj, "a", where, str), _field(obj, "b", where, str)
        ll.append(CandidateEdge.ll(a, b, _field(obj, "cost", where)))
    il = []
    for j, obj in enumerate(_list(data, "il_edges", required=False)):
        where = f"il_edges[{j}]"
        il.append(CandidateEdge.il(_field(obj, "i", where, str), _field(obj, "l", where, str),
                                   _field(obj, "cost", where)))

    topology = Topology(tuple(l_nodes), tuple(i_nodes), tuple(ll), tuple(il))
    try:
        return validate_topology(topology)
    except TopologyError as exc:
        raise InstanceFormatError(f"instance: {exc}") from exc


def instance_to_dict(topology: Topology) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "l_nodes": [
            {"id": l.id, "op_cost": l.op_cost, "base_compute": l.base_compute.to_dict(),
             "initial_samples": l.initial_samples}
            for l in topology.l_nodes
        ],
        "i_nodes": [
            {"id": i.id, "op_cost": i.op_cost, "gen_time": i.gen_time.to_dict(), "rate": i.rate}
            for i in topology.i_nodes
        ],
        "ll_edges": [{"a": e.key[0], "b": e.key[1], "cost": e.comm_cost}
                     for e in topology.ll_candidates],
        "il_edges": [{"i": e.key[0], "l": e.key[1], "cost": e.comm_cost}
                     for e in topology.il_candidates],
    }


def load_instance(path: Path) -> Topology:
    try:
        return instance_from_dict(read_json(path))
    except InstanceFormatError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise InstanceFormatError(f"{path}: {exc}") from exc


def save_instance(topology: Topology, path: Path) -> Path:
    return write_json(path, instance_to_dict(topology))


# ── Profiles and observations ─────────────────────────────────────────────────

def profile_from_dict(data: Any, eps_max: Optional[float] = None,
                      t_max: Optional[float] = None) -> LearningProfile:
    """Coefficients from `data`; explicit eps_max / t_max override the file."""
    where = "profile"
    if eps_max is None:
        eps_max = _field(data, "eps_max", where)
    if t_max is None:
        raw = data.get("t_max") if isinstance(data, dict) else None
        t_max = math.inf if raw is None else _field(data, "t_max", where)
    try:
        return LearningProfile(
            c1=_field(data, "c1", where),
            c2=_field(data, "c2", where),
            c3=_field(data, "c3", where),
            eps_max=eps_max,
            t_max=t_max,
        )
    except ValueError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc


def load_profile(path: Path, eps_max: Optional[float] = None,
                 t_max: Optional[float] = None) -> LearningProfile:
    try:
        return profile_from_dict(read_json(path), eps_max, t_max)
    except InstanceFormatError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise InstanceFormatError(f"{path}: {exc}") from exc


def profile_to_dict(profile: LearningProfile) -> dict:
    return {
        "c1": profile.c1, "c2": profile.c2, "c3": profile.c3,
        "eps_max": profile.eps_max, "t_max": _finite(profile.t_max),
    }


def fit_to_dict(fit: ProfileFit) -> dict:
    return {"c1": fit.c1, "c2": fit.c2, "c3": fit.c3, "mse": fit.mse,
            "observations": fit.observations}


def load_observations(path: Path) -> list[ProfileObservation]:
    """Read an `X,K,gamma,error` CSV."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"{path}: cannot read ({exc.strerror})") from exc
    with handle:
        reader = csv.DictReader(handle)
        missing = [f for f in OBSERVATION_FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            raise InstanceFormatError(f"{path}: line 1: missing column(s) {', '.join(missing)}")
        out = []
        for row in reader:
            try:
                values = {f: float(row[f]) for f in OBSERVATION_FIELDS}
            except (TypeError, ValueError) as exc:
                raise InstanceFormatError(f"{path}: line {reader.line_num}: {exc}") from exc
            out.append(ProfileObservation(**values))
    return out


def write_observations(path: Path, observations: Iterable[ProfileObservation]) -> Path:
    rows = [{"X": o.X, "K": o.K, "gamma": o.gamma, "error": o.error} for o in observations]
    return write_csv(path, OBSERVATION_FIELDS, rows)


# ── Row streams ───────────────────────────────────────────────────────────────

def write_csv(path: Path, fields: Sequence[str], rows: Iterable[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_trace(path: Path, trace: Iterable[TraceEntry]) -> Path:
    rows = ({f: getattr(t, f) for f in TraceEntry.FIELDS} for t in trace)
    return write_csv(path, TraceEntry.FIELDS, rows)


def write_gantt(path: Path, events: Iterable[GanttEvent]) -> Path:
    rows = ({f: getattr(e, f) for f in GanttEvent.FIELDS} for e in events)
    return write_csv(path, GanttEvent.FIELDS, rows)


# ── Solutions and statistics ──────────────────────────────────────────────────

def outcome_to_dict(outcome: OptimizationOutcome) -> dict:
    out: dict[str, Any] = {
        "algorithm": outcome.algorithm,
        "feasible": outcome.feasible,
        "reason": outcome.reason,
        "iterations": outcome.iterations,
        "evaluations": outcome.evaluations,
    }
    sol = outcome.solution
    if sol is None:
        out.update({"selection": None, "epochs": None, "error": None,
                    "time": None, "cost": None})
        return out
    r = sol.result
    out.update({
        "selection": {
            "ll_edges": [list(e) for e in sorted(sol.selection.ll_edges)],
            "il_edges": [list(e) for e in sorted(sol.selection.il_edges)],
        },
        "epochs": r.epochs,
        "error": _finite(r.error),
        "time": _finite(r.time),
        "cost": _finite(r.cost),
        "per_epoch_cost": _finite(r.per_epoch_cost),
        "margin": _finite(r.margin),
        "gamma": _finite(r.gamma),
    })
    return out


def selection_from_dict(data: Any, topology: Topology) -> Selection:
    """Selection stored in a solution document; edges must be candidates."""
    sel = data.get("selection") if isinstance(data, dict) else None
    if not isinstance(sel, dict):
        raise InstanceFormatError("selection: missing or null (infeasible solution?)")
    ll = set()
    for j, e in enumerate(_field(sel, "ll_edges", "selection", list)):
        if not (isinstance(e, list) and len(e) == 2):
            raise InstanceFormatError(f"selection.ll_edges[{j}]: expected [a, b]")
        key = ll_key(str(e[0]), str(e[1]))
        if key not in topology.ll_cost:
            raise InstanceFormatError(f"selection.ll_edges[{j}]: {key} is not a candidate")
        ll.add(key)
    il = set()
    for j, e in enumerate(_field(sel, "il_edges", "selection", list)):
        if not (isinstance(e, list) and len(e) == 2):
            raise InstanceFormatError(f"selection.il_edges[{j}]: expected [i, l]")
        key = (str(e[0]), str(e[1]))
        if key not in topology.il_cost:
            raise InstanceFormatError(f"selection.il_edges[{j}]: {key} is not a candidate")
        il.add(key)
    epochs = data.get("epochs")
    if isinstance(epochs, bool) or not isinstance(epochs, int) or epochs < 1:
        raise InstanceFormatError(f"epochs: expected a positive integer, got {epochs!r}")
    return Selection(frozenset(ll), frozenset(il), epochs)


def load_solution(path: Path, topology: Topology) -> Selection:
    try:
        return selection_from_dict(read_json(path), topology)
    except InstanceFormatError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise InstanceFormatError(f"{path}: {exc}") from exc


def simstats_to_dict(stats: SimStats) -> dict:
    return {
        "epoch_means": list(stats.epoch_means),
        "epoch_std_errors": list(stats.epoch_std_errors),
        "total_mean": stats.total_mean,
        "std_error": stats.std_error,
        "reps": stats.reps,
        "seed": stats.seed,
        "shared_draw": stats.shared_draw,
    }


# ── Profile sources ───────────────────────────────────────────────────────────

def resolve_profile(config: RunConfig) -> LearningProfile:
    """Learning profile from the single source named in a RunConfig."""
    if config.profile is not None:
        return load_profile(config.profile, config.eps_max, config.t_max)

    if config.coefficients is not None:
        c1, c2, c3 = config.coefficients
    elif config.observations is not None:
        fit = fit_profile(load_observations(config.observations))
        c1, c2, c3 = fit.c1, fit.c2, fit.c3
    else:
        raise ValueError("give one profile source: --profile, --coefficients or --observations")

    if config.eps_max is None:
        raise ValueError("--eps-max is required with --coefficients or --observations")
    t_max = math.inf if config.t_max is None else config.t_max
    return LearningProfile(c1, c2, c3, config.eps_max, t_max)
