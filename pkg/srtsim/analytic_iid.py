"""
Relay selection when all main links share one average gain and all
wiretap links share another.

The total-probability sums then collapse to short closed forms, outage
and intercept can be tied together through a single parameter
theta = 1 - P_out^(1/N), and the N -> infinity laws follow directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import bisect

from srtsim.errors import DomainError, InfeasibleError, NumericalError
from srtsim.numerics import (
    check_count,
    check_nonneg,
    check_positive,
    check_probability,
    clip_unit,
    one_minus_exp_neg,
    one_minus_nth_root,
    power,
)

SOLVER_MAX_ITER = 200
SOLVER_TOL = 1e-12
# Grid used to confirm the finite-N relation is increasing in theta before bisecting.
_MONOTONE_CHECK_POINTS = 257


@dataclass(frozen=True)
class IidSrtQuery:
    """A tradeoff query: N relays, MER, and theta derived from an outage level."""

    n_relays: int
    mer: float
    theta: float

    def __post_init__(self) -> None:
        check_count(self.n_relays, "n_relays")
        check_positive(self.mer, "mer")
        check_probability(self.theta, "theta")

    @classmethod
    def from_outage(cls, p_out: float, n_relays: int, mer: float) -> "IidSrtQuery":
        return cls(n_relays=n_relays, mer=mer, theta=theta_from_outage(p_out, n_relays))


# ─── Building blocks ──────────────────────────────────────────


def iid_pr_decoding_set_empty(n: int, sigma_m2: float, delta: float) -> float:
    n = check_count(n, "n")
    return one_minus_exp_neg(delta / check_positive(sigma_m2, "sigma_m2")) ** n


def iid_pr_decoding_set(size: int, n: int, sigma_m2: float, delta: float) -> float:
    """Probability of one particular decoding set of `size` members out of n."""
    n = check_count(n, "n")
    size = check_count(size, "size", minimum=0)
    if size > n:
        raise DomainError(f"set size {size} exceeds N = {n}")
    sigma_m2 = check_positive(sigma_m2, "sigma_m2")
    delta = check_nonneg(delta, "delta")
    return math.exp(-size * delta / sigma_m2) * one_minus_exp_neg(delta / sigma_m2) ** (n - size)


def iid_pr_best_outage(size: int, sigma_m2: float, delta: float) -> float:
    size = check_count(size, "size")
    return one_minus_exp_neg(check_nonneg(delta, "delta") / check_positive(sigma_m2, "sigma_m2")) ** size


def iid_eav_intercept_given_set(sigma_e2: float, delta: float) -> float:
    """Selection combining of two i.i.d. wiretap copies: 2e^-x - e^-2x."""
    x = check_nonneg(delta, "delta") / check_positive(sigma_e2, "sigma_e2")
    e = math.exp(-x)
    return clip_unit(2.0 * e - e * e)


def theta_from_outage(p_out: float, n: int) -> float:
    p_out = check_probability(p_out, "p_out")
    return one_minus_nth_root(p_out, check_count(n, "n"))


# ─── Closed forms ─────────────────────────────────────────────


def iid_outage(n: int, sigma_m2: float, delta: float) -> float:
    """[1 - exp(-2 delta / sigma_m2)]^n."""
    n = check_count(n, "n")
    x = 2.0 * check_nonneg(delta, "delta") / check_positive(sigma_m2, "sigma_m2")
    return one_minus_exp_neg(x) ** n


def iid_intercept(n: int, sigma_m2: float, sigma_e2: float, delta: float) -> float:
    empty = iid_pr_decoding_set_empty(n, sigma_m2, delta)
    source_only = math.exp(-check_nonneg(delta, "delta") / check_positive(sigma_e2, "sigma_e2"))
    combined = iid_eav_intercept_given_set(sigma_e2, delta)
    return clip_unit(empty * source_only + (1.0 - empty) * combined)


def iid_intercept_limit(sigma_e2: float, delta: float) -> float:
    """Intercept as N -> infinity at fixed delta: the decoding set is never empty."""
    return iid_eav_intercept_given_set(sigma_e2, delta)


def _intercept_from_theta(theta: float, n: int, mer: float) -> float:
    miss = (1.0 - math.sqrt(theta)) ** n
    half = power(theta, mer / 2.0)
    full = power(theta, mer)
    return miss * half + (1.0 - miss) * (2.0 * half - full)


def intercept_from_outage_finite(p_out: float, n: int, mer: float) -> float:
    """Intercept probability of N relays operated at outage `p_out`."""
    p_out = check_probability(p_out, "p_out", open_interval=True)
    n = check_count(n, "n")
    mer = check_positive(mer, "mer")
    return clip_unit(_intercept_from_theta(theta_from_outage(p_out, n), n, mer))


def intercept_asymptotic(p_out: float, n: int, mer: float) -> float:
    """Large-N intercept at outage `p_out`, ignoring the empty-decoding-set term."""
    p_out = check_probability(p_out, "p_out", open_interval=True)
    n = check_count(n, "n")
    mer = check_positive(mer, "mer")
    theta = theta_from_outage(p_out, n)
    return clip_unit(2.0 * power(theta, mer / 2.0) - power(theta, mer))


def outage_from_intercept_asymptotic(p_int: float, n: int, mer: float) -> float:
    """Inverse of the large-N law: [1 - (1 - sqrt(1 - p_int))^(2/mer)]^n."""
    p_int = check_probability(p_int, "p_int", open_interval=True)
    n = check_count(n, "n")
    mer = check_positive(mer, "mer")
    # 1 - sqrt(1 - p) written to avoid cancellation for small p
    root_gap = p_int / (1.0 + math.sqrt(1.0 - p_int))
    per_relay = one_minus_exp_neg(-(2.0 / mer) * math.log(root_gap))
    return clip_unit(math.exp(n * math.log(per_relay)) if per_relay > 0.0 else 0.0)


# ─── Inversion ────────────────────────────────────────────────


def _assert_increasing_in_theta(n: int, mer: float) -> None:
    previous = -1.0
    for k in range(_MONOTONE_CHECK_POINTS):
        theta = k / (_MONOTONE_CHECK_POINTS - 1)
        value = _intercept_from_theta(theta, n, mer)
        if value < previous - 1e-15:
            raise NumericalError(
                f"intercept relation is not increasing in theta near {theta:.4f} (N={n}, mer={mer})"
            )
        previous = value


def solve_outage_given_intercept_finite(
    p_int_target: float,
    n: int,
    mer: float,
    tol: float = SOLVER_TOL,
) -> float:
    """
    Outage of N relays whose finite-N intercept equals `p_int_target`.

    Bisects on theta in [0, 1], where the relation runs from 0 to 1, then
    returns (1 - theta)^n.
    """
    p_int_target = check_probability(p_int_target, "p_int_target", open_interval=True)
    n = check_count(n, "n")
    mer = check_positive(mer, "mer")
    tol = check_positive(tol, "tol")

    _assert_increasing_in_theta(n, mer)

    def gap(theta: float) -> float:
        return _intercept_from_theta(theta, n, mer) - p_int_target

    low, high = gap(0.0), gap(1.0)
    if low > 0.0 or high < 0.0:
        raise InfeasibleError(
            f"intercept target {p_int_target} outside the reachable range "
            f"[{low + p_int_target}, {high + p_int_target}] for N={n}, mer={mer}"
        )
    try:
        theta = bisect(gap, 0.0, 1.0, xtol=tol, maxiter=SOLVER_MAX_ITER)
    except RuntimeError as exc:
        raise NumericalError(f"bisection did not converge: {exc}") from exc
    return clip_unit(math.exp(n * math.log1p(-theta)) if theta < 1.0 else 0.0)


def relays_required(
    p_out_max: float,
    p_int_max: float,
    mer: float,
    n_max: int = 10_000,
) -> int:
    """Smallest N whose intercept at outage `p_out_max` does not exceed `p_int_max`."""
    p_out_max = check_probability(p_out_max, "p_out_max", open_interval=True)
    p_int_max = check_probability(p_int_max, "p_int_max", open_interval=True)
    n_max = check_count(n_max, "n_max")

    def meets(n: int) -> bool:
        return intercept_from_outage_finite(p_out_max, n, mer) <= p_int_max

    if not meets(n_max):
        raise InfeasibleError(
            f"no N <= {n_max} keeps intercept <= {p_int_max} at outage {p_out_max} (mer={mer})"
        )
    # intercept is decreasing in N at fixed outage, so binary search the first hit
    low, high = 1, n_max
    while low < high:
        mid = (low + high) // 2
        if meets(mid):
            high = mid
        else:
            low = mid + 1
    return low
