"""
Runtime settings, read from the environment with optional .env pre-loading.

Usage:
    from lib.config import get_settings
    settings = get_settings()
    settings.threads, settings.grid_resolution, settings.k_cap

Variables (all optional):
    NETLEARN_ENV_FILE                 dotenv file to load first (default ./.env)
    NETLEARN_THREADS                  worker threads (default 1)
    NETLEARN_GRID_RESOLUTION          grid points per distribution (default 4096)
    NETLEARN_QUANTILE_CUT             tail cut for unbounded laws (default 1-1e-9)
    NETLEARN_K_CAP                    epoch search cap (default 1_000_000)
    NETLEARN_EPOCH_SAMPLES            exact epochs per time evaluation in the
                                      optimizers, 0 = all (default 64)
    NETLEARN_MAX_BRUTE_FORCE_STATES   brute-force guard (default 2**18)
    NETLEARN_LOG_DIR                  log directory (default ~/.netlearn/logs)
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, TypeVar

from dotenv import load_dotenv

from .errors import ConfigurationError

T = TypeVar("T")

DEFAULT_LOG_DIR = Path("~/.netlearn/logs").expanduser()


@dataclass(frozen=True)
class Settings:
    """Numerical and runtime knobs shared by the library and the commands."""

    threads: int = 1
    grid_resolution: int = 4096
    quantile_cut: float = 1.0 - 1e-9
    k_cap: int = 1_000_000
    epoch_samples: Optional[int] = 64
    max_brute_force_states: int = 2 ** 18
    log_dir: Path = DEFAULT_LOG_DIR

    def with_overrides(self, **changes) -> "Settings":
        return replace(self, **changes)


def _read(name: str, parse: Callable[[str], T], default: T,
          check: Callable[[T], bool]) -> T:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = parse(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name}={raw!r}: {exc}") from exc
    if not check(value):
        raise ConfigurationError(f"{name}={raw!r} is out of range")
    return value


def get_settings() -> Settings:
    """Build Settings from the environment (after loading the dotenv file)."""
    load_dotenv(Path(os.environ.get("NETLEARN_ENV_FILE", ".env")))

    epoch_samples = _read("NETLEARN_EPOCH_SAMPLES", int, 64,
                          lambda v: v == 0 or v >= 2)
    return Settings(
        threads=_read("NETLEARN_THREADS", int, 1, lambda v: v >= 1),
        grid_resolution=_read("NETLEARN_GRID_RESOLUTION", int, 4096,
                              lambda v: v >= 64),
        quantile_cut=_read("NETLEARN_QUANTILE_CUT", float, 1.0 - 1e-9,
                           lambda v: 0.0 < v < 1.0),
        k_cap=_read("NETLEARN_K_CAP", int, 1_000_000, lambda v: v >= 1),
        epoch_samples=epoch_samples or None,
        max_brute_force_states=_read("NETLEARN_MAX_BRUTE_FORCE_STATES", int,
                                     2 ** 18, lambda v: v >= 1),
        log_dir=_read("NETLEARN_LOG_DIR", lambda s: Path(s).expanduser(),
                      DEFAULT_LOG_DIR, lambda v: True),
    )
