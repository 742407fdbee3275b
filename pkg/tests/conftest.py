"""Shared fixtures: small hand-built topologies, profiles and fast settings."""
from __future__ import annotations

import math
from itertools import combinations
from pathlib import Path

import pytest

from lib.config import Settings
from lib.models import (
    CandidateEdge,
    ExponentialSpec,
    INode,
    LearningProfile,
    LNode,
    Topology,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def _isolated_env(tmp_path, monkeypatch):
    """Keep logs and dotenv lookups inside the test's tmp dir."""
    monkeypatch.setenv("NETLEARN_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("NETLEARN_ENV_FILE", str(tmp_path / "absent.env"))
    for name in ("NETLEARN_THREADS", "NETLEARN_GRID_RESOLUTION", "NETLEARN_K_CAP",
                 "NETLEARN_EPOCH_SAMPLES", "NETLEARN_QUANTILE_CUT",
                 "NETLEARN_MAX_BRUTE_FORCE_STATES"):
        monkeypatch.delenv(name, raising=False)


def build_topology(
    n_l: int,
    n_i: int,
    compute=ExponentialSpec(1.0),
    gen=ExponentialSpec(1.0),
    initial_samples: float = 1000.0,
    rate: float = 0.0,
    ll: str = "complete",
    il: str = "complete",
    ll_cost=lambda a, b: 1.0,
    il_cost=lambda i, l: 1.0,
    l_op_cost: float = 0.0,
    i_op_cost: float = 0.0,
) -> Topology:
    """Topology with ids L1.. / I1.. and complete (or empty) candidate sets."""
    l_ids = [f"L{j}" for j in range(1, n_l + 1)]
    i_ids = [f"I{j}" for j in range(1, n_i + 1)]
    l_nodes = tuple(LNode(l, l_op_cost, compute, initial_samples) for l in l_ids)
    i_nodes = tuple(INode(i, i_op_cost, gen, rate) for i in i_ids)
    ll_edges = ()
    if ll == "complete":
        ll_edges = tuple(CandidateEdge.ll(a, b, ll_cost(a, b)) for a, b in combinations(l_ids, 2))
    il_edges = ()
    if il == "complete":
        il_edges = tuple(CandidateEdge.il(i, l, il_cost(i, l)) for i in i_ids for l in l_ids)
    return Topology(l_nodes, i_nodes, ll_edges, il_edges)


@pytest.fixture
def topology_factory():
    return build_topology


@pytest.fixture
def fast_settings(tmp_path) -> Settings:
    return Settings(grid_resolution=512, epoch_samples=8, log_dir=tmp_path / "logs")


@pytest.fixture
def classification_profile() -> LearningProfile:
    """Reference classification coefficients, no deadline."""
    return LearningProfile(0.6799, 0.4978, 542.1, eps_max=0.95, t_max=math.inf)


@pytest.fixture
def regression_profile() -> LearningProfile:
    return LearningProfile(0.0956, 0.5203, 963.2, eps_max=0.5, t_max=math.inf)


@pytest.fixture
def example_instance_path() -> Path:
    return DATA / "example_instance.json"


@pytest.fixture
def classification_profile_path() -> Path:
    return DATA / "classification_profile.json"
