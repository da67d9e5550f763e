"""
Floating-point helpers shared by the analytic engines.

Outage probabilities of interest go down to 1e-6 and below, so every
`1 - exp(-x)` goes through expm1 and every root of a probability goes
through the log domain.
"""

from __future__ import annotations

import math
from typing import Iterable

from srtsim.errors import DomainError

# Below this base, powers are taken as exp(e * ln(base)).
_LOG_DOMAIN_BELOW = 1e-280


# ─── Validation ───────────────────────────────────────────────


def check_positive(value: float, name: str) -> float:
    """Return `value` as float if finite and > 0, else raise DomainError."""
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def check_nonneg(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def check_probability(value: float, name: str, *, open_interval: bool = False) -> float:
    """Check `value` lies in [0, 1] (or (0, 1) when `open_interval`)."""
    value = float(value)
    if open_interval:
        ok = 0.0 < value < 1.0
        bounds = "(0, 1)"
    else:
        ok = 0.0 <= value <= 1.0
        bounds = "[0, 1]"
    if not ok:
        raise DomainError(f"{name} must lie in {bounds}, got {value!r}")
    return value


def check_count(value: int, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


# ─── Primitives ───────────────────────────────────────────────


def one_minus_exp_neg(x: float) -> float:
    """1 - exp(-x), accurate down to x = 1e-300."""
    return -math.expm1(-x)


def power(base: float, exponent: float) -> float:
    """base ** exponent for base in [0, 1], switching to logs for tiny bases."""
    if base == 0.0:
        return 0.0 if exponent > 0.0 else 1.0
    if base < _LOG_DOMAIN_BELOW:
        return math.exp(exponent * math.log(base))
    return base ** exponent


def one_minus_nth_root(p: float, n: float) -> float:
    """1 - p ** (1/n) without cancellation when p ** (1/n) is close to 1."""
    if p == 0.0:
        return 1.0
    return -math.expm1(math.log(p) / n)


def compensated_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum, independent of summation order."""
    return math.fsum(values)


def relative_error(observed: float, expected: float) -> float:
    """|observed - expected| / |expected|, falling back to absolute error at 0."""
    scale = abs(expected)
    diff = abs(observed - expected)
    return diff / scale if scale > 0.0 else diff


def clip_unit(value: float) -> float:
    """Clamp rounding spill-over (e.g. 1 + 2e-16) back into [0, 1]."""
    return min(1.0, max(0.0, value))
