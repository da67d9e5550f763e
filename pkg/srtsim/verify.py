"""
Cross-verification suite.

Each check compares two independent routes to the same number:
  - dt_round_trip:      outage vs outage recovered from intercept (direct transmission)
  - iid_vs_general:     i.i.d. closed forms vs the general subset enumeration
  - outage_intercept:   finite-N outage->intercept relation vs the i.i.d. intercept
  - selection_law:      best-relay probabilities of every set sum to one
  - quadrature:         inclusion-exclusion vs numerical integration of the best-relay law
  - printed_form:       expanded conditional intercept vs the complement composition
  - mc_containment:     Monte Carlo estimates vs analytic values inside their intervals

Random cases come from a numpy Generator seeded with the suite seed, so
the report is a pure function of (seed, trials, perturb).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from srtsim.analytic_dt import dt_intercept, dt_outage, dt_outage_from_intercept
from srtsim.analytic_iid import intercept_from_outage_finite, iid_intercept, iid_outage
from srtsim.analytic_ors import (
    ors_srt,
    pr_best_is,
    pr_eav_intercept_given_set,
    pr_eav_intercept_given_set_printed,
    subset_tables,
)
from srtsim.errors import DomainError, NumericalError
from srtsim.models import ChannelProfile, DecodingSet, IidProfile, SystemConfig, all_decoding_sets, mer_from_db
from srtsim.montecarlo import DEFAULT_CONFIDENCE, simulate_dt, simulate_ors
from srtsim.numerics import check_count, relative_error
from srtsim.results import CheckRow

MIN_TRIALS = 100_000

QUAD_ABS_TOL = 1e-10
# Integration range in units of the largest average gain; the tail beyond is below e^-40.
QUAD_RANGE = 40.0

MC_RELAYS = (1, 2, 4)
MC_MER_DB = (5.0, 10.0)
MC_DELTAS = (0.03, 0.1, 0.3, 1.0)
# At most one miss per 48 interval checks.
MC_MISS_RATE = 1.0 / 48.0


@dataclass
class CheckResult:
    """Outcome of one check: worst observed deviation and the case that produced it."""

    name: str
    tolerance: float
    cases: int = 0
    max_delta: float = 0.0
    worst_case: Dict[str, Any] = field(default_factory=dict)
    passed: Optional[bool] = None

    def observe(self, delta: float, case: Dict[str, Any]) -> None:
        self.cases += 1
        if delta > self.max_delta or not self.worst_case:
            self.max_delta = max(self.max_delta, delta)
            self.worst_case = case

    def finish(self) -> "CheckResult":
        if self.passed is None:
            self.passed = self.max_delta <= self.tolerance
        return self

    def as_row(self) -> CheckRow:
        failing = "" if self.passed else json.dumps(self.worst_case, sort_keys=True)
        return CheckRow(
            check=self.name,
            status="pass" if self.passed else "fail",
            max_delta=self.max_delta,
            tolerance=self.tolerance,
            cases=self.cases,
            failing_case=failing,
        )


@dataclass
class VerificationReport:
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def rows(self) -> List[CheckRow]:
        return [c.as_row() for c in self.checks]

    def __getitem__(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


# ─── Quadrature oracle ────────────────────────────────────────


def quadrature_pr_best_is(dset: DecodingSet, i: int, sigma_id2: Sequence[float]) -> float:
    """
    Pr(relay i has the largest relay->destination gain in `dset`) by
    integrating the CDF product of the others against i's density.
    """
    if i not in dset:
        raise DomainError(f"relay {i} is not a member of decoding set {dset}")
    others = [sigma_id2[j] for j in dset.members if j != i]
    s_i = float(sigma_id2[i])
    upper = QUAD_RANGE * max(sigma_id2[j] for j in dset.members)

    def integrand(x: float) -> float:
        below = 1.0
        for s in others:
            below *= -math.expm1(-x / s)
        return below * math.exp(-x / s_i) / s_i

    result = quad(integrand, 0.0, upper, epsabs=QUAD_ABS_TOL, epsrel=QUAD_ABS_TOL, limit=200, full_output=1)
    if len(result) > 3:
        raise NumericalError(f"quadrature did not converge for relay {i} in {dset}: {result[3]}")
    return float(result[0])


# ─── Random cases ─────────────────────────────────────────────


def _log_uniform(rng: np.random.Generator, low: float, high: float, size: Optional[int] = None):
    values = np.exp(rng.uniform(math.log(low), math.log(high), size))
    return values.tolist() if size is not None else float(values)


def _random_profile(rng: np.random.Generator, n: int) -> ChannelProfile:
    return ChannelProfile(
        sigma_sd2=_log_uniform(rng, 0.2, 5.0),
        sigma_se2=_log_uniform(rng, 0.05, 2.0),
        sigma_si2=_log_uniform(rng, 0.2, 5.0, n),
        sigma_id2=_log_uniform(rng, 0.2, 5.0, n),
        sigma_ie2=_log_uniform(rng, 0.05, 2.0, n),
    )


def _bump(values: Tuple[float, ...], amount: float) -> Tuple[float, ...]:
    return (values[0] + amount,) + values[1:]


# ─── Checks ───────────────────────────────────────────────────


def check_dt_round_trip(rng: np.random.Generator, cases: int = 1000) -> CheckResult:
    check = CheckResult("dt_round_trip", tolerance=1e-12)
    for _ in range(cases):
        sd, se = _log_uniform(rng, 0.1, 10.0), _log_uniform(rng, 0.1, 10.0)
        alpha = _log_uniform(rng, 1e-2, 10.0)
        direct = dt_outage(sd, alpha)
        recovered = dt_outage_from_intercept(dt_intercept(se, alpha), se, sd)
        check.observe(relative_error(recovered, direct), {"sigma_sd2": sd, "sigma_se2": se, "alpha": alpha})
    return check.finish()


def check_iid_vs_general(rng: np.random.Generator, perturb: float = 0.0, per_n: int = 100) -> CheckResult:
    check = CheckResult("iid_vs_general", tolerance=1e-10)
    for n in range(1, 7):
        for _ in range(per_n):
            sigma_m2 = _log_uniform(rng, 0.5, 5.0)
            sigma_e2 = _log_uniform(rng, 0.05, 2.0)
            delta = _log_uniform(rng, 1e-3, 2.0)
            profile = IidProfile(sigma_m2, sigma_e2, n).expand()
            if perturb:
                profile = replace(profile, sigma_si2=_bump(profile.sigma_si2, perturb))
            general = ors_srt(profile, delta)
            case = {"n": n, "sigma_m2": sigma_m2, "sigma_e2": sigma_e2, "delta": delta}
            check.observe(
                max(
                    relative_error(general.p_out, iid_outage(n, sigma_m2, delta)),
                    relative_error(general.p_int, iid_intercept(n, sigma_m2, sigma_e2, delta)),
                ),
                case,
            )
    return check.finish()


def check_outage_intercept_relation(rng: np.random.Generator, perturb: float = 0.0, cases: int = 500) -> CheckResult:
    check = CheckResult("outage_intercept", tolerance=1e-10)
    for _ in range(cases):
        n = int(rng.integers(1, 11))
        sigma_m2 = _log_uniform(rng, 0.5, 5.0)
        sigma_e2 = _log_uniform(rng, 0.1, 1.0)
        delta = _log_uniform(rng, 1e-2, 0.5)
        mer = sigma_m2 / sigma_e2
        p_out = iid_outage(n, sigma_m2 + perturb, delta)
        expected = iid_intercept(n, sigma_m2, sigma_e2, delta)
        observed = intercept_from_outage_finite(p_out, n, mer)
        check.observe(
            relative_error(observed, expected),
            {"n": n, "sigma_m2": sigma_m2, "sigma_e2": sigma_e2, "delta": delta},
        )
    return check.finish()


def check_selection_laws(
    rng: np.random.Generator,
    perturb: float = 0.0,
    profiles: int = 200,
) -> Tuple[CheckResult, CheckResult, CheckResult, CheckResult]:
    """Selection law, quadrature agreement, expanded form, and enumeration vs tables."""
    selection = CheckResult("selection_law", tolerance=1e-12)
    oracle = CheckResult("quadrature", tolerance=1e-8)
    printed = CheckResult("printed_form", tolerance=1e-12)
    tables = CheckResult("enumeration_vs_tables", tolerance=1e-12)

    for k in range(profiles):
        n = int(rng.integers(1, 7))
        profile = _random_profile(rng, n)
        delta = _log_uniform(rng, 1e-2, 2.0)
        oracle_id2 = _bump(profile.sigma_id2, perturb)
        printed_se2 = profile.sigma_se2 + perturb
        table = subset_tables(profile, delta)
        label = {"profile": k, "n": n, "delta": delta}

        for dset in all_decoding_sets(n):
            if dset.is_empty:
                continue
            best = {i: pr_best_is(dset, i, profile.sigma_id2) for i in dset.members}
            selection.observe(abs(math.fsum(best.values()) - 1.0), dict(label, set=str(dset)))

            complement = pr_eav_intercept_given_set(
                dset, profile.sigma_se2, profile.sigma_id2, profile.sigma_ie2, delta
            )
            expanded = pr_eav_intercept_given_set_printed(
                dset, printed_se2, profile.sigma_id2, profile.sigma_ie2, delta
            )
            printed.observe(abs(expanded - complement), dict(label, set=str(dset)))
            tables.observe(
                abs(float(table.conditional_intercept[dset.mask]) - complement),
                dict(label, set=str(dset)),
            )

            if dset.size == n:
                for i, value in best.items():
                    oracle.observe(
                        abs(quadrature_pr_best_is(dset, i, oracle_id2) - value),
                        dict(label, relay=i),
                    )
    return selection.finish(), oracle.finish(), printed.finish(), tables.finish()


def check_mc_containment(
    trials: int,
    seed: int,
    workers: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
) -> CheckResult:
    """
    Interval containment on a fixed grid of relay counts, MERs and
    thresholds, for relay selection and for direct transmission.
    """
    check = CheckResult("mc_containment", tolerance=0.0)
    misses = 0

    def record(estimate, exact: float, case: Dict[str, Any]) -> None:
        nonlocal misses
        contained = estimate.contains(exact)
        gap = abs(estimate.p_hat - exact) - estimate.ci_half_width
        if not contained:
            misses += 1
        check.observe(max(gap, 0.0) if not contained else 0.0, dict(case, p_hat=estimate.p_hat, exact=exact))

    case_seed = seed
    for mer_db in MC_MER_DB:
        mer = mer_from_db(mer_db)
        for delta in MC_DELTAS:
            config = SystemConfig.from_delta(delta)
            for n in MC_RELAYS:
                iid = IidProfile.from_mer(mer, n)
                est_out, est_int = simulate_ors(config, iid.expand(), trials, case_seed, workers, confidence)
                exact = ors_srt(iid.expand(), config.delta)
                case = {"scheme": "ors", "n": n, "mer_db": mer_db, "delta": delta, "seed": case_seed}
                record(est_out, exact.p_out, dict(case, probability="p_out"))
                record(est_int, exact.p_int, dict(case, probability="p_int"))
                case_seed += 1

            dt_profile = IidProfile.from_mer(mer, 1).expand()
            est_out, est_int = simulate_dt(config, dt_profile, trials, case_seed, workers, confidence)
            case = {"scheme": "dt", "mer_db": mer_db, "delta": delta, "seed": case_seed}
            record(est_out, dt_outage(1.0, config.alpha), dict(case, probability="p_out"))
            record(est_int, dt_intercept(1.0 / mer, config.alpha), dict(case, probability="p_int"))
            case_seed += 1

    allowed = max(1, math.floor(check.cases * MC_MISS_RATE))
    check.passed = misses <= allowed
    check.tolerance = float(allowed)
    check.max_delta = float(misses) if misses else 0.0
    return check


# ─── Suite ────────────────────────────────────────────────────


def verify_suite(
    seed: int,
    trials: int,
    perturb: float = 0.0,
    workers: int = 1,
    confidence: float = DEFAULT_CONFIDENCE,
    on_check: Optional[Callable[[CheckResult], None]] = None,
) -> VerificationReport:
    """
    Run every check. `perturb` shifts one average gain on one side of each
    equality check, which must then fail while interval containment holds.
    """
    trials = check_count(trials, "trials", minimum=MIN_TRIALS)
    rng = np.random.default_rng(seed)

    checks: List[CheckResult] = []

    def done(*results: CheckResult) -> None:
        for result in results:
            checks.append(result)
            if on_check is not None:
                on_check(result)

    done(check_dt_round_trip(rng))
    done(check_iid_vs_general(rng, perturb))
    done(check_outage_intercept_relation(rng, perturb))
    done(*check_selection_laws(rng, perturb))
    done(check_mc_containment(trials, seed, workers, confidence))
    return VerificationReport(checks=checks)
