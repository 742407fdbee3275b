from pathlib import Path

import pytest

from lib.config import Settings, get_settings
from lib.errors import ConfigurationError
from lib.scenario import RICH_MULTIPLIER, generate_instance, with_rate_multiplier


def test_defaults_without_environment():
    s = get_settings()
    assert s.threads == 1
    assert s.grid_resolution == 4096
    assert s.epoch_samples == 64
    assert s.max_brute_force_states == 2 ** 18


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NETLEARN_THREADS", "4")
    monkeypatch.setenv("NETLEARN_EPOCH_SAMPLES", "0")
    monkeypatch.setenv("NETLEARN_K_CAP", "5000")
    s = get_settings()
    assert (s.threads, s.epoch_samples, s.k_cap) == (4, None, 5000)


@pytest.mark.parametrize("name, value", [
    ("NETLEARN_THREADS", "0"),
    ("NETLEARN_THREADS", "many"),
    ("NETLEARN_GRID_RESOLUTION", "16"),
    ("NETLEARN_QUANTILE_CUT", "1.5"),
])
def test_invalid_environment_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigurationError, match=name):
        get_settings()


def test_dotenv_file_is_loaded(monkeypatch, tmp_path):
    env_file = tmp_path / "netlearn.env"
    env_file.write_text("NETLEARN_GRID_RESOLUTION=1024\n")
    monkeypatch.setenv("NETLEARN_ENV_FILE", str(env_file))
    # Registered so that teardown removes what the dotenv loader sets.
    monkeypatch.setenv("NETLEARN_GRID_RESOLUTION", "unset")
    monkeypatch.delenv("NETLEARN_GRID_RESOLUTION")
    assert get_settings().grid_resolution == 1024


def test_with_overrides_returns_a_copy():
    base = Settings()
    changed = base.with_overrides(threads=8, log_dir=Path("/tmp/x"))
    assert base.threads == 1
    assert changed.threads == 8


# ── Scenario generator ────────────────────────────────────────────────────────

def test_generator_is_deterministic():
    assert generate_instance(5, 4, seed=9) == generate_instance(5, 4, seed=9)
    assert generate_instance(5, 4, seed=9) != generate_instance(5, 4, seed=10)


def test_generator_ranges():
    t = generate_instance(6, 8, seed=2)
    assert all(10.0 <= i.rate <= 100.0 for i in t.i_nodes)
    assert all(0.0 <= e.comm_cost <= 1.0 for e in (*t.ll_candidates, *t.il_candidates))
    assert len(t.ll_candidates) == 15
    assert len(t.il_candidates) == 48


def test_single_homed_inodes():
    t = generate_instance(4, 6, seed=1, single_homed=True)
    assert sorted(i for i, _ in t.il_keys) == sorted(t.i_ids)


def test_rate_multiplier():
    t = generate_instance(3, 3, seed=0)
    rich = with_rate_multiplier(t, RICH_MULTIPLIER)
    assert [i.rate for i in rich.i_nodes] == [i.rate * RICH_MULTIPLIER for i in t.i_nodes]
    assert with_rate_multiplier(t, 1.0) is t
    with pytest.raises(ValueError):
        with_rate_multiplier(t, 0.0)
