"""
Closed-form expected learning time for fully connected instances.

Both formulas expand H^k(t) = H_l(t)^|L| with the multinomial theorem, where
H_l is the CDF of one L-node's epoch duration (slowest of |I| deliveries plus
one compute draw), and integrate term by term.

Exponential case:
    H_l(t) = 1 + sum_{w=1..|I|} B_w exp(-w lambda_I t) + B_L exp(-lambda_L t)
    E[epoch] = integral of 1 - H_l^|L|

Uniform case (a_L <= a_I <= b_I <= b_L): H_l is a polynomial on each of three
pieces [a_L+a_I, a_L+b_I], [a_L+b_I, b_L+a_I], [b_L+a_I, b_L+b_I]; the epoch
mean is the sum over pieces of the integral of t d(H_l^|L|).
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from typing import Union

from .errors import OrderingError, PoleError

logger = logging.getLogger(__name__)

Range = tuple[float, float]

# Relative distance below which lambda_L == w * lambda_I counts as a pole.
POLE_TOL = 1e-12


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first, *rest)


def multinomial(parts: Sequence[int]) -> int:
    out = math.factorial(sum(parts))
    for a in parts:
        out //= math.factorial(a)
    return out


def _per_epoch(value, epochs: int, what: str, pair: bool = False) -> list:
    if pair and _is_pair(value):
        return [tuple(value)] * epochs
    if not pair and isinstance(value, (int, float)):
        return [value] * epochs
    values = list(value)
    if len(values) != epochs:
        raise ValueError(f"{what}: expected {epochs} per-epoch values, got {len(values)}")
    return values


def _check_sizes(n_l: int, n_i: int, epochs: int) -> None:
    if n_l < 1 or n_i < 1:
        raise ValueError(f"closed forms need |L| >= 1 and |I| >= 1, got ({n_l}, {n_i})")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")


# ── Exponential ───────────────────────────────────────────────────────────────

def _exponential_epoch(n_l: int, n_i: int, rate_i: float, rate_l: float) -> float:
    for w in range(1, n_i + 1):
        if math.isclose(rate_l, w * rate_i, rel_tol=POLE_TOL):
            raise PoleError(
                f"lambda_L = {rate_l} equals {w} * lambda_I; perturb one rate"
            )

    # B[w-1] multiplies exp(-w lambda_I t); b_l multiplies exp(-lambda_L t).
    b = [
        math.comb(n_i, w) * (-1) ** (w + 1) * rate_l / (w * rate_i - rate_l)
        for w in range(1, n_i + 1)
    ]
    b_l = sum(
        math.comb(n_i, z) * (-1) ** (z + 1) * z * rate_i / (rate_l - z * rate_i)
        for z in range(1, n_i + 1)
    )

    # Parts: a_1..a_n for the B_w terms, then the constant term, then the L term.
    total = 0.0
    for a in compositions(n_l, n_i + 2):
        if a[n_i] == n_l:
            continue
        coeff = float(multinomial(a))
        for w in range(n_i):
            if a[w]:
                coeff *= b[w] ** a[w]
        if a[n_i + 1]:
            coeff *= b_l ** a[n_i + 1]
        decay = rate_i * sum((w + 1) * a[w] for w in range(n_i)) + rate_l * a[n_i + 1]
        total += coeff / decay
    return -total


def closed_form_T_exponential(
    n_l: int,
    n_i: int,
    rate_i: float,
    rate_l: Union[float, Sequence[float]],
    epochs: int,
) -> float:
    """
    Expected learning time when every L-node is fed by every I-node.

    `rate_l` is either one compute rate for all epochs or one per epoch
    (a compute law scaled by f has rate lambda_L / f). Raises PoleError
    when lambda_L = w * lambda_I for some w <= |I|.
    """
    _check_sizes(n_l, n_i, epochs)
    if not (rate_i > 0.0):
        raise ValueError(f"lambda_I must be > 0, got {rate_i}")
    rates = _per_epoch(rate_l, epochs, "rate_l")
    if any(not (r > 0.0) for r in rates):
        raise ValueError("every lambda_L must be > 0")

    cache: dict[float, float] = {}
    total = 0.0
    for r in rates:
        if r not in cache:
            cache[r] = _exponential_epoch(n_l, n_i, rate_i, r)
        total += cache[r]
    logger.debug("Exponential closed form |L|=%d |I|=%d K=%d -> %.6f", n_l, n_i, epochs, total)
    return total


# ── Uniform ───────────────────────────────────────────────────────────────────

def _piece_mean(start: float, width: float, terms: Sequence[tuple[float, int]],
                n_l: int) -> float:
    """Integral of t d(H^n_l) over [start, start+width], H = sum c u^p in u = t-start."""
    if width <= 0.0:
        return 0.0
    total = 0.0
    for a in compositions(n_l, len(terms)):
        s = sum(p * k for (_, p), k in zip(terms, a))
        if s == 0:
            continue
        coeff = float(multinomial(a))
        for (c, _), k in zip(terms, a):
            if k:
                coeff *= c ** k
        total += coeff * (s * width ** (s + 1) / (s + 1) + start * width ** s)
    return total


def _uniform_epoch(n_l: int, n_i: int, range_i: Range, range_l: Range) -> float:
    a_i, b_i = range_i
    a_l, b_l = range_l
    if not (0.0 <= a_l <= a_i < b_i <= b_l):
        raise OrderingError(
            f"need a_L <= a_I < b_I <= b_L, got I=({a_i}, {b_i}) L=({a_l}, {b_l})"
        )
    n = n_i
    d = b_i - a_i
    w = b_l - a_l
    tail = 1.0 / ((n + 1) * d ** n)

    pieces = (
        (a_l + a_i, d, [(tail / w, n + 1)]),
        (a_l + b_i, w - d, [(d / ((n + 1) * w), 0), (1.0 / w, 1)]),
        (b_l + a_i, d, [((d / (n + 1) + w - d) / w, 0), (1.0 / w, 1), (-tail / w, n + 1)]),
    )
    return sum(_piece_mean(start, width, terms, n_l) for start, width, terms in pieces)


def closed_form_T_uniform(
    n_l: int,
    n_i: int,
    range_i: Range,
    range_l: Union[Range, Sequence[Range]],
    epochs: int,
) -> float:
    """
    Expected learning time for U(a_I, b_I) deliveries and U(a_L, b_L) compute.

    `range_l` is one (a_L, b_L) pair or one pair per epoch. Every epoch must
    satisfy a_L <= a_I < b_I <= b_L, otherwise OrderingError.
    """
    _check_sizes(n_l, n_i, epochs)
    ranges = _per_epoch(range_l, epochs, "range_l", pair=True)
    total = sum(_uniform_epoch(n_l, n_i, tuple(range_i), tuple(r)) for r in ranges)
    logger.debug("Uniform closed form |L|=%d |I|=%d K=%d -> %.6f", n_l, n_i, epochs, total)
    return total


def _is_pair(value) -> bool:
    return (
        isinstance(value, (tuple, list))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    )
