"""
Exception hierarchy for netlearn.

Every error also derives from ValueError so callers that only rely on the
builtin contract keep working. Infeasibility is never raised: it is a value
(see learning.min_epochs and the optimizer outcomes).
"""
from __future__ import annotations

from typing import Any, Optional


class NetLearnError(ValueError):
    """Base class for all netlearn errors."""


class TopologyError(NetLearnError):
    """An instance violates a type invariant; `element` names the offender."""

    def __init__(self, message: str, element: Optional[Any] = None) -> None:
        super().__init__(message)
        self.element = element


class InstanceFormatError(NetLearnError):
    """A JSON/CSV file is malformed; the message names the line or field path."""


class DistributionError(NetLearnError):
    """A distribution spec has parameters outside their valid range."""


class ConfigurationError(NetLearnError):
    """Settings or model parameters that make a quantity undefined."""


class DisconnectedGraphError(NetLearnError):
    """Spectral gap is zero: the error law diverges."""


class PoleError(NetLearnError):
    """Closed-form coefficient hits a pole (lambda_L == w * lambda_I)."""


class OrderingError(NetLearnError):
    """Uniform closed form requires a_L <= a_I <= b_I <= b_L."""


class UnderdeterminedFitError(NetLearnError):
    """Profiling observations cannot pin down c1..c3."""


class InstanceTooLargeError(NetLearnError):
    """Brute force refused: enumeration exceeds the configured bound."""

    def __init__(self, states: int, bound: int) -> None:
        super().__init__(
            f"brute force needs {states} states, bound is {bound}"
        )
        self.states = states
        self.bound = bound
