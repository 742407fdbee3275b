"""
Fit of the error-law coefficients from profiling runs.

Given c3 the law is linear in (c1, c2), so the mean squared error is a
function of c3 alone: a log-spaced scan brackets its minimum and a
golden-section search refines it.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import UnderdeterminedFitError
from .models import ProfileFit, ProfileObservation

logger = logging.getLogger(__name__)

MIN_OBSERVATIONS = 4
_SCAN_POINTS = 121


def _linear_fit(c3: float, X: np.ndarray, scale: np.ndarray,
                error: np.ndarray) -> tuple[float, float, float]:
    z = np.log(c3 + X) / scale
    design = np.column_stack([np.ones_like(z), z])
    (c1, c2), *_ = np.linalg.lstsq(design, error, rcond=None)
    residual = error - (c1 + c2 * z)
    return float(c1), float(c2), float(np.mean(residual ** 2))


def fit_profile(observations: Sequence[ProfileObservation]) -> ProfileFit:
    """Least-squares fit of (c1, c2, c3 >= 0) to the observations."""
    if len(observations) < MIN_OBSERVATIONS:
        raise UnderdeterminedFitError(
            f"need at least {MIN_OBSERVATIONS} observations, got {len(observations)}"
        )
    X = np.array([o.X for o in observations], dtype=float)
    K = np.array([o.K for o in observations], dtype=float)
    gamma = np.array([o.gamma for o in observations], dtype=float)
    error = np.array([o.error for o in observations], dtype=float)

    if np.any(X <= 0) or np.any(K <= 0) or np.any(gamma <= 0):
        raise UnderdeterminedFitError("X, K and gamma must all be positive")
    if np.unique(X).size < 2:
        raise UnderdeterminedFitError("observations must span at least 2 distinct X values")

    scale = np.sqrt(K * gamma)

    def mse(c3: float) -> float:
        return _linear_fit(c3, X, scale, error)[2]

    grid = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, _SCAN_POINTS - 1) * X.max()))
    scores = np.array([mse(c) for c in grid])
    j = int(np.argmin(scores))
    best = float(grid[j])

    if 0 < j < grid.size - 1:
        try:
            res = minimize_scalar(mse, bracket=(grid[j - 1], grid[j], grid[j + 1]),
                                  method="golden")
            if res.x >= 0.0 and res.fun <= scores[j]:
                best = float(res.x)
        except (ValueError, RuntimeError):
            logger.debug("Flat bracket around c3=%.6g, keeping scan minimum", best)

    c1, c2, score = _linear_fit(best, X, scale, error)
    logger.info("Fitted c1=%.6g c2=%.6g c3=%.6g (mse=%.3g, n=%d)",
                c1, c2, best, score, len(observations))
    return ProfileFit(c1=c1, c2=c2, c3=best, mse=score, observations=len(observations))
