"""
Direct transmission (S -> D, overheard by E).

Closed-form intercept and outage probabilities under Rayleigh fading and
the tradeoff relation between them, which depends only on the ratio of
the wiretap and main average gains, not on transmit power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List

from srtsim.models import ChannelProfile, SrtPoint
from srtsim.numerics import (
    check_nonneg,
    check_positive,
    check_probability,
    one_minus_exp_neg,
)


@dataclass(frozen=True)
class DtSrtResult:
    """Intercept and outage probability of direct transmission at one threshold."""

    p_int: float
    p_out: float

    def __post_init__(self) -> None:
        check_probability(self.p_int, "p_int")
        check_probability(self.p_out, "p_out")

    def as_point(self) -> SrtPoint:
        return SrtPoint(p_out=self.p_out, p_int=self.p_int, provenance="analytic", label="dt")


def dt_intercept(sigma_se2: float, alpha: float) -> float:
    """Pr(|h_se|^2 > alpha) = exp(-alpha / sigma_se2)."""
    sigma_se2 = check_positive(sigma_se2, "sigma_se2")
    alpha = check_nonneg(alpha, "alpha")
    return math.exp(-alpha / sigma_se2)


def dt_outage(sigma_sd2: float, alpha: float) -> float:
    """Pr(|h_sd|^2 < alpha) = 1 - exp(-alpha / sigma_sd2)."""
    sigma_sd2 = check_positive(sigma_sd2, "sigma_sd2")
    alpha = check_nonneg(alpha, "alpha")
    return one_minus_exp_neg(alpha / sigma_sd2)


def dt_outage_from_intercept(p_int: float, sigma_se2: float, sigma_sd2: float) -> float:
    """Outage implied by an intercept level: 1 - p_int ** (sigma_se2 / sigma_sd2)."""
    p_int = check_probability(p_int, "p_int")
    exponent = check_positive(sigma_se2, "sigma_se2") / check_positive(sigma_sd2, "sigma_sd2")
    if p_int == 0.0:
        return 1.0
    return -math.expm1(exponent * math.log(p_int))


def dt_intercept_from_outage(p_out: float, sigma_se2: float, sigma_sd2: float) -> float:
    """Inverse relation: intercept level reached at a given outage, (1 - p_out) ** (sd/se)."""
    p_out = check_probability(p_out, "p_out")
    exponent = check_positive(sigma_sd2, "sigma_sd2") / check_positive(sigma_se2, "sigma_se2")
    if p_out == 1.0:
        return 0.0
    return math.exp(exponent * math.log1p(-p_out))


def dt_srt(profile: ChannelProfile, alpha: float) -> DtSrtResult:
    return DtSrtResult(
        p_int=dt_intercept(profile.sigma_se2, alpha),
        p_out=dt_outage(profile.sigma_sd2, alpha),
    )


def dt_srt_curve(
    p_int_values: Iterable[float],
    sigma_se2: float,
    sigma_sd2: float,
) -> List[SrtPoint]:
    """Trace the DT tradeoff parametrically in p_int, without sweeping a threshold."""
    return [
        SrtPoint(
            p_out=dt_outage_from_intercept(p, sigma_se2, sigma_sd2),
            p_int=float(p),
            provenance="analytic",
            label="dt",
        )
        for p in p_int_values
    ]
