"""End-to-end runs of the netlearn subcommands."""
import csv
import json

import pytest

import netlearn
import scripts.simulate as simulate_script
from lib.learning import predicted_error
from lib.models import LearningProfile, ProfileObservation, TraceEntry
from lib.serialization import load_instance, load_profile, write_observations


def _run(capsys, *argv):
    code = netlearn.main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def solved(tmp_path, capsys, example_instance_path, classification_profile_path):
    out_dir = tmp_path / "run"
    code, summary = _run(capsys, "optimize", "--instance", example_instance_path,
                         "--profile", classification_profile_path, "--out-dir", out_dir)
    assert code == 0
    return out_dir, summary


# ── gen-instance ──────────────────────────────────────────────────────────────

def test_gen_instance_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, summary = _run(capsys, "gen-instance", "--l-nodes", 10, "--i-nodes", 20,
                             "--seed", 3, "--out", path)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert summary["ll_candidates"] == 45
    assert summary["il_candidates"] == 200
    assert load_instance(a).l_ids[0] == "L1"


def test_rich_scenario_multiplies_rates_only(tmp_path, capsys):
    basic, rich = tmp_path / "basic.json", tmp_path / "rich.json"
    _run(capsys, "gen-instance", "--l-nodes", 3, "--i-nodes", 4, "--seed", 1, "--out", basic)
    _run(capsys, "gen-instance", "--l-nodes", 3, "--i-nodes", 4, "--seed", 1, "--rich",
         "--out", rich)
    b, r = load_instance(basic), load_instance(rich)
    assert [i.rate * 5.0 for i in b.i_nodes] == [i.rate for i in r.i_nodes]
    assert b.ll_candidates == r.ll_candidates
    assert b.il_candidates == r.il_candidates


# ── optimize ──────────────────────────────────────────────────────────────────

def test_optimize_example(solved):
    out_dir, summary = solved
    assert summary["feasible"] is True
    assert summary["epochs"] == 92
    document = json.loads((out_dir / "solution.json").read_text())
    assert len(document["selection"]["ll_edges"]) == 6
    assert document["selection"]["il_edges"] == []
    header = (out_dir / "trace.csv").read_text().splitlines()[0]
    assert header == ",".join(TraceEntry.FIELDS)


def test_optimize_reports_error_floor(tmp_path, capsys, example_instance_path):
    code, summary = _run(capsys, "optimize", "--instance", example_instance_path,
                         "--coefficients", 0.6799, 0.4978, 542.1, "--eps-max", 0.5,
                         "--out-dir", tmp_path)
    assert code == 2
    assert summary["reason"] == "infeasible: error floor"
    assert summary["selection"] is None


def test_optimize_missing_instance_is_an_error(tmp_path, capsys, classification_profile_path):
    code, summary = _run(capsys, "optimize", "--instance", tmp_path / "nope.json",
                         "--profile", classification_profile_path, "--out-dir", tmp_path)
    assert code == 1
    assert summary is None


def test_optimize_with_baseline_algorithm(tmp_path, capsys, example_instance_path):
    code, summary = _run(capsys, "optimize", "--instance", example_instance_path,
                         "--coefficients", 0.0956, 0.5203, 963.2, "--eps-max", 0.5,
                         "--algorithm", "opt-unif", "--out-dir", tmp_path)
    assert code == 0
    assert summary["algorithm"] == "opt-unif"
    assert summary["epochs"] == 48


# ── simulate ──────────────────────────────────────────────────────────────────

def test_simulate_is_reproducible(tmp_path, capsys, solved, example_instance_path):
    run_dir, _ = solved
    outputs = []
    for name in ("first", "second"):
        out_dir = tmp_path / name
        code, summary = _run(capsys, "simulate", "--instance", example_instance_path,
                             "--solution", run_dir / "solution.json", "--reps", 2000,
                             "--seed", 7, "--out-dir", out_dir)
        assert code == 0
        assert summary["reps"] == 2000
        outputs.append([(out_dir / f).read_bytes()
                        for f in ("gantt.csv", "simstats.json", "comparison.csv")])
    assert outputs[0] == outputs[1]

    rows = _rows(tmp_path / "first" / "comparison.csv")
    assert len(rows) == 92 + 1
    assert rows[-1]["epoch"] == "total"


def test_simulate_flags_disagreement_with_the_grid_engine(tmp_path, capsys, monkeypatch, solved,
                                                         example_instance_path):
    run_dir, _ = solved
    exact = simulate_script.epoch_means
    monkeypatch.setattr(simulate_script, "epoch_means",
                        lambda *args, **kwargs: 1.5 * exact(*args, **kwargs))
    code, summary = _run(capsys, "simulate", "--instance", example_instance_path,
                         "--solution", run_dir / "solution.json", "--reps", 2000,
                         "--seed", 7, "--out-dir", tmp_path / "sim")
    assert code == 3
    assert summary["max_abs_z"] > 5.0
    assert (tmp_path / "sim" / "comparison.csv").exists()


def test_simulate_rejects_few_replications(tmp_path, capsys, solved, example_instance_path):
    run_dir, _ = solved
    code, _ = _run(capsys, "simulate", "--instance", example_instance_path,
                   "--solution", run_dir / "solution.json", "--reps", 99,
                   "--out-dir", tmp_path / "sim")
    assert code == 1


# ── fit ───────────────────────────────────────────────────────────────────────

def test_fit_writes_a_usable_profile(tmp_path, capsys):
    truth = LearningProfile(0.6799, 0.4978, 542.1, eps_max=1.0)
    obs = [ProfileObservation(X, K, g, predicted_error(K, g, X, truth))
           for X in (500.0, 600.0, 700.0, 800.0, 900.0, 1000.0)
           for K in (10.0, 40.0) for g in (1.0, 2.0)]
    csv_path = write_observations(tmp_path / "obs.csv", obs)
    code, summary = _run(capsys, "fit", "--observations", csv_path, "--eps-max", 0.95,
                         "--out", tmp_path / "profile.json")
    assert code == 0
    assert summary["c3"] == pytest.approx(542.1, rel=1e-2)
    profile = load_profile(tmp_path / "profile.json")
    assert profile.eps_max == 0.95
    assert profile.c1 == pytest.approx(0.6799, rel=1e-2)


def test_fit_with_too_few_rows(tmp_path, capsys):
    path = tmp_path / "obs.csv"
    path.write_text("X,K,gamma,error\n100,1,1,0.9\n200,1,1,0.8\n300,1,1,0.7\n")
    code, _ = _run(capsys, "fit", "--observations", path, "--out", tmp_path / "p.json")
    assert code == 1


# ── compare ───────────────────────────────────────────────────────────────────

def test_compare_all_algorithms(tmp_path, capsys, example_instance_path):
    code, summary = _run(capsys, "compare", "--instance", example_instance_path,
                         "--coefficients", 0.6799, 0.4978, 542.1, "--eps-max", 0.95,
                         "--brute-force", "--out-dir", tmp_path)
    assert code == 0
    rows = _rows(tmp_path / "comparison.csv")
    assert [r["algorithm"] for r in rows] == ["double-climb", "opt-unif", "ga", "brute-force"]
    costs = {r["algorithm"]: float(r["cost"]) for r in rows}
    assert costs["double-climb"] == pytest.approx(costs["brute-force"])
    assert float(rows[0]["normalized_d_L"]) == pytest.approx(1.0)
    assert summary["path"].endswith("comparison.csv")


# ── logging ───────────────────────────────────────────────────────────────────

def test_library_logs_follow_the_running_command(tmp_path, capsys, monkeypatch,
                                                 example_instance_path):
    first, second = tmp_path / "first-logs", tmp_path / "second-logs"
    monkeypatch.setenv("NETLEARN_LOG_DIR", str(first))
    code, _ = _run(capsys, "gen-instance", "--l-nodes", 3, "--i-nodes", 2,
                   "--out", tmp_path / "instance.json")
    assert code == 0

    monkeypatch.setenv("NETLEARN_LOG_DIR", str(second))
    code = netlearn.main(["optimize", "--instance", str(example_instance_path),
                          "--coefficients", "0.6799", "0.4978", "542.1", "--eps-max", "0.95",
                          "--out-dir", str(tmp_path / "run")])
    assert code == 0
    assert "double-climb: feasible" in capsys.readouterr().err
    assert "double-climb: feasible" in (second / "optimize.log").read_text()
    assert "double-climb" not in (first / "gen-instance.log").read_text()
