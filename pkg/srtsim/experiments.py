"""
Experiment sweeps: the datasets behind the tradeoff curves.

Three sweep kinds:
  - srt_curve:       (outage, intercept) pairs of DT and ORS along a threshold sweep
  - outage_vs_n:     outage versus relay count under an intercept constraint
  - intercept_vs_n:  intercept versus relay count under an outage constraint

Every sweep is split into independent jobs (one per grid point) that the
SweepRunner executes concurrently; rows always come back in grid order.
The expected orderings and monotonicities of each sweep are evaluated as
TrendCheck postconditions alongside the rows.
"""

from __future__ import annotations

import asyncio
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from srtsim.analytic_dt import dt_intercept, dt_intercept_from_outage, dt_outage
from srtsim.analytic_iid import (
    iid_intercept,
    iid_intercept_limit,
    iid_outage,
    intercept_asymptotic,
    intercept_from_outage_finite,
    outage_from_intercept_asymptotic,
    solve_outage_given_intercept_finite,
)
from srtsim.analytic_ors import ENUMERATION_CAP, ors_srt
from srtsim.errors import DomainError, InfeasibleError, SrtError
from srtsim.models import IidProfile, SystemConfig, mer_from_db
from srtsim.montecarlo import DEFAULT_CONFIDENCE, estimate_status, simulate_dt, simulate_ors
from srtsim.results import CheckRow, ResultRow

KINDS = ("srt_curve", "outage_vs_n", "intercept_vs_n", "verify")
ENGINES = ("analytic_general", "analytic_iid", "asymptotic", "mc")
VARIABLES = ("delta", "rate", "snr_db")

# Outage levels at which curves are compared.
OUTAGE_ANCHORS = (1e-3, 1e-2, 1e-1)

DEFAULT_TRIALS = 1_000_000
DEFAULT_SEED = 42

_DEFAULT_FIXED: Dict[str, Dict[str, Any]] = {
    "srt_curve": {"mer_db": [10.0], "n_relays": [2, 4, 6], "snr_db": 0.0, "rate": 1.0},
    "outage_vs_n": {"mer_db": [5.0], "p_int": [1e-1, 1e-2, 1e-3]},
    "intercept_vs_n": {"mer_db": [5.0], "p_out": [1e-1, 1e-2, 1e-3]},
    "verify": {},
}


# ─── Specs and results ────────────────────────────────────────


@dataclass(frozen=True)
class SweepSpec:
    """
    What to sweep and with which engines.

    Attributes:
        kind: One of KINDS.
        grid: Strictly increasing sweep values (threshold, rate, SNR in dB, or N).
        fixed: Named bindings, e.g. mer_db, n_relays, p_int / p_out constraint lists.
        engines: Subset of ENGINES.
        variable: For srt_curve, which quantity the grid holds (one of VARIABLES).
        enumeration_cap: Largest relay count the exact engine enumerates.
    """

    kind: str
    grid: Tuple[float, ...]
    fixed: Mapping[str, Any] = field(default_factory=dict)
    engines: Tuple[str, ...] = ("analytic_general", "analytic_iid", "asymptotic")
    variable: str = "delta"
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    confidence: float = DEFAULT_CONFIDENCE
    enumeration_cap: int = ENUMERATION_CAP

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown sweep kind {self.kind!r}; expected one of {KINDS}")
        if self.variable not in VARIABLES:
            raise DomainError(f"unknown sweep variable {self.variable!r}; expected one of {VARIABLES}")
        unknown = [e for e in self.engines if e not in ENGINES]
        if unknown or not self.engines:
            raise DomainError(f"engines must be a non-empty subset of {ENGINES}, got {self.engines}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise DomainError("sweep grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "engines", tuple(self.engines))
        merged = dict(_DEFAULT_FIXED[self.kind])
        merged.update(self.fixed)
        object.__setattr__(self, "fixed", merged)
        for key in ("p_int", "p_out"):
            for value in self.list_of(key):
                if not 0.0 < value < 1.0:
                    raise DomainError(f"constraint {key}={value} must lie in (0, 1)")
        if self.kind in ("outage_vs_n", "intercept_vs_n"):
            if any(v < 1 or v != int(v) for v in grid):
                raise DomainError("relay-count grids must hold integers >= 1")

    def list_of(self, key: str) -> List[float]:
        value = self.fixed.get(key, [])
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(value)]


@dataclass(frozen=True)
class TrendCheck:
    """A machine-checked ordering or monotonicity expectation."""

    name: str
    passed: bool
    detail: str = ""
    cases: int = 1

    def as_row(self) -> CheckRow:
        return CheckRow(
            check=self.name,
            status="pass" if self.passed else "fail",
            max_delta=None,
            tolerance=None,
            cases=self.cases,
            failing_case="" if self.passed else self.detail,
        )


@dataclass
class SweepResult:
    rows: List[ResultRow]
    trends: List[TrendCheck]

    @property
    def trends_passed(self) -> bool:
        return all(t.passed for t in self.trends)


# ─── Grids ────────────────────────────────────────────────────


def log_grid(grid_min: float, grid_max: float, points: int) -> Tuple[float, ...]:
    """Log-uniform grid, endpoints included."""
    if not 0.0 < grid_min < grid_max or points < 2:
        raise DomainError("log grid needs 0 < grid_min < grid_max and points >= 2")
    return tuple(float(v) for v in np.logspace(math.log10(grid_min), math.log10(grid_max), points))


def relay_grid(n_min: int, n_max: int, points: int) -> Tuple[float, ...]:
    """Log-spaced distinct relay counts between n_min and n_max."""
    if not 1 <= n_min <= n_max:
        raise DomainError("relay grid needs 1 <= n_min <= n_max")
    raw = np.round(np.logspace(math.log10(n_min), math.log10(n_max), max(points, 2)))
    return tuple(float(v) for v in np.unique(raw.astype(int)))


def default_grid(kind: str) -> Tuple[float, ...]:
    if kind == "srt_curve":
        return log_grid(1e-4, 10.0, 41)
    if kind == "outage_vs_n":
        return tuple(float(2 ** k) for k in range(11))
    if kind == "intercept_vs_n":
        return relay_grid(1, 10_000, 41)
    return (1.0,)


# ─── Curve helpers ────────────────────────────────────────────


def intercept_at_outage(scheme: str, p_out: float, n: int, mer: float) -> float:
    """Intercept of DT (unit main gain) or of N i.i.d. relays operated at outage p_out."""
    if scheme == "dt":
        return dt_intercept_from_outage(p_out, sigma_se2=1.0 / mer, sigma_sd2=1.0)
    return intercept_from_outage_finite(p_out, n, mer)


def config_for(variable: str, value: float, fixed: Mapping[str, Any]) -> SystemConfig:
    """System config at one srt_curve grid point (unit main-link gain)."""
    if variable == "delta":
        return SystemConfig.from_delta(value, mer_from_db(float(fixed["snr_db"])))
    if variable == "rate":
        return SystemConfig.from_db(value, float(fixed["snr_db"]))
    return SystemConfig.from_db(float(fixed["rate"]), value)


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _error_status(exc: SrtError) -> str:
    return "infeasible" if isinstance(exc, InfeasibleError) else f"error:{exc.kind}"


# ─── srt_curve ────────────────────────────────────────────────


def _srt_point_rows(spec: SweepSpec, index: int) -> List[ResultRow]:
    config = config_for(spec.variable, spec.grid[index], spec.fixed)
    delta, alpha = config.delta, config.alpha
    common = dict(rate=config.rate, snr_db=config.snr_db, delta=delta)
    analytic_requested = any(e in spec.engines for e in ENGINES if e != "mc")
    rows: List[ResultRow] = []

    for mer_db in spec.list_of("mer_db"):
        mer = mer_from_db(mer_db)
        base = dict(sweep_kind="srt_curve", mer_db=mer_db, **common)

        # Direct transmission, unit main gain.
        if analytic_requested:
            rows.append(ResultRow(
                scheme="dt", n_relays=0, engine="analytic",
                p_out=dt_outage(1.0, alpha), p_int=dt_intercept(1.0 / mer, alpha), **base,
            ))
        if "mc" in spec.engines:
            dt_profile = IidProfile.from_mer(mer, 1).expand()
            est_out, est_int = simulate_dt(config, dt_profile, spec.trials, spec.seed, 1, spec.confidence)
            rows.append(_mc_row(base, "dt", 0, est_out, est_int, spec))

        for n in spec.list_of("n_relays"):
            n = int(n)
            iid = IidProfile.from_mer(mer, n)
            for engine in spec.engines:
                row = dict(base, scheme="ors", n_relays=n, engine=engine)
                try:
                    if engine == "analytic_general":
                        point = ors_srt(iid.expand(), delta, cap=spec.enumeration_cap)
                        rows.append(ResultRow(p_out=point.p_out, p_int=point.p_int, **row))
                    elif engine == "analytic_iid":
                        rows.append(ResultRow(
                            p_out=iid_outage(n, iid.sigma_m2, delta),
                            p_int=iid_intercept(n, iid.sigma_m2, iid.sigma_e2, delta),
                            **row,
                        ))
                    elif engine == "asymptotic":
                        rows.append(ResultRow(
                            p_out=iid_outage(n, iid.sigma_m2, delta),
                            p_int=iid_intercept_limit(iid.sigma_e2, delta),
                            **row,
                        ))
                    else:
                        est_out, est_int = simulate_ors(
                            config, iid.expand(), spec.trials, spec.seed, 1, spec.confidence
                        )
                        rows.append(_mc_row(base, "ors", n, est_out, est_int, spec))
                except SrtError as exc:
                    rows.append(ResultRow(status=_error_status(exc), **row))
    return rows


def _mc_row(base: Dict[str, Any], scheme: str, n: int, est_out, est_int, spec: SweepSpec) -> ResultRow:
    return ResultRow(
        scheme=scheme, n_relays=n, engine="mc",
        p_out=est_out.p_hat, p_int=est_int.p_hat,
        ci_out=est_out.ci_half_width, ci_int=est_int.ci_half_width,
        trials=spec.trials, seed=spec.seed, status=estimate_status(est_out, est_int), **base,
    )


def _srt_curve_trends(spec: SweepSpec, rows: Sequence[ResultRow]) -> List[TrendCheck]:
    trends: List[TrendCheck] = []
    relay_counts = sorted(int(n) for n in spec.list_of("n_relays"))
    mers = sorted(spec.list_of("mer_db"))

    for mer_db in mers:
        mer = mer_from_db(mer_db)
        for p_out in OUTAGE_ANCHORS:
            chain = [("dt", intercept_at_outage("dt", p_out, 0, mer))]
            chain += [(f"ors{n}", intercept_at_outage("ors", p_out, n, mer)) for n in relay_counts]
            values = [v for _, v in chain]
            trends.append(TrendCheck(
                name=f"srt_order[mer_db={mer_db},p_out={p_out}]",
                passed=_strictly_decreasing(values),
                detail=" > ".join(f"{label}={v:.6g}" for label, v in chain),
                cases=len(values),
            ))

    for low, high in zip(mers, mers[1:]):
        for p_out in OUTAGE_ANCHORS:
            for scheme, n in [("dt", 0)] + [("ors", n) for n in relay_counts]:
                weak = intercept_at_outage(scheme, p_out, n, mer_from_db(low))
                strong = intercept_at_outage(scheme, p_out, n, mer_from_db(high))
                trends.append(TrendCheck(
                    name=f"mer_order[{scheme}{n or ''},p_out={p_out}]",
                    passed=strong < weak,
                    detail=f"{high} dB: {strong:.6g} < {low} dB: {weak:.6g}",
                ))

    # Along each analytic curve, raising the threshold trades intercept for outage.
    curves: Dict[Tuple[str, float, int], List[ResultRow]] = {}
    for row in rows:
        if row.engine in ("analytic", "analytic_iid") and row.status == "ok":
            curves.setdefault((row.scheme, row.mer_db, row.n_relays), []).append(row)
    for (scheme, mer_db, n), curve in sorted(curves.items()):
        curve = sorted(curve, key=lambda r: r.delta)
        outs = [r.p_out for r in curve]
        ints = [r.p_int for r in curve]
        monotone = all(b >= a for a, b in zip(outs, outs[1:])) and all(
            b <= a for a, b in zip(ints, ints[1:])
        )
        trends.append(TrendCheck(
            name=f"threshold_tradeoff[{scheme}{n or ''},mer_db={mer_db}]",
            passed=monotone,
            detail=f"{len(curve)} points",
            cases=len(curve),
        ))
    return trends


# ─── outage_vs_n / intercept_vs_n ─────────────────────────────


def _outage_vs_n_rows(spec: SweepSpec, index: int) -> List[ResultRow]:
    n = int(spec.grid[index])
    rows: List[ResultRow] = []
    for mer_db in spec.list_of("mer_db"):
        mer = mer_from_db(mer_db)
        for p_int in spec.list_of("p_int"):
            base = dict(sweep_kind="outage_vs_n", scheme="ors", n_relays=n, mer_db=mer_db, p_int=p_int)
            for engine, solve in (
                ("analytic_iid", solve_outage_given_intercept_finite),
                ("asymptotic", outage_from_intercept_asymptotic),
            ):
                if engine not in spec.engines and not (engine == "analytic_iid" and "analytic_general" in spec.engines):
                    continue
                try:
                    rows.append(ResultRow(engine=engine, p_out=solve(p_int, n, mer), **base))
                except SrtError as exc:
                    rows.append(ResultRow(engine=engine, status=_error_status(exc), **base))
    return rows


def _intercept_vs_n_rows(spec: SweepSpec, index: int) -> List[ResultRow]:
    n = int(spec.grid[index])
    rows: List[ResultRow] = []
    for mer_db in spec.list_of("mer_db"):
        mer = mer_from_db(mer_db)
        for p_out in spec.list_of("p_out"):
            base = dict(sweep_kind="intercept_vs_n", scheme="ors", n_relays=n, mer_db=mer_db, p_out=p_out)
            for engine, evaluate in (
                ("analytic_iid", intercept_from_outage_finite),
                ("asymptotic", intercept_asymptotic),
            ):
                if engine not in spec.engines and not (engine == "analytic_iid" and "analytic_general" in spec.engines):
                    continue
                try:
                    rows.append(ResultRow(engine=engine, p_int=evaluate(p_out, n, mer), **base))
                except SrtError as exc:
                    rows.append(ResultRow(engine=engine, status=_error_status(exc), **base))
    return rows


def _versus_n_trends(spec: SweepSpec, rows: Sequence[ResultRow]) -> List[TrendCheck]:
    """Decreasing in N per curve, and ordered across constraint levels at every N."""
    if spec.kind == "outage_vs_n":
        constraint, measured = "p_int", "p_out"
    else:
        constraint, measured = "p_out", "p_int"
    curves: Dict[Tuple[str, float, float], List[Tuple[int, float]]] = {}
    for row in rows:
        if row.status == "ok":
            key = (row.engine, row.mer_db, getattr(row, constraint))
            curves.setdefault(key, []).append((row.n_relays, getattr(row, measured)))

    trends: List[TrendCheck] = []
    for (engine, mer_db, level), points in sorted(curves.items()):
        values = [v for _, v in sorted(points)]
        trends.append(TrendCheck(
            name=f"decreasing_in_n[{engine},mer_db={mer_db},{constraint}={level}]",
            passed=_strictly_decreasing(values),
            detail=f"{measured} from {values[0]:.6g} to {values[-1]:.6g} over {len(values)} relay counts",
            cases=len(values),
        ))

    # Relaxing the constraint lowers the other probability at every N.
    levels = sorted(spec.list_of(constraint))
    for engine in sorted({k[0] for k in curves}):
        for mer_db in sorted({k[1] for k in curves}):
            for low, high in zip(levels, levels[1:]):
                tight = dict(curves.get((engine, mer_db, low), []))
                loose = dict(curves.get((engine, mer_db, high), []))
                shared = sorted(set(tight) & set(loose))
                bad = [n for n in shared if not loose[n] < tight[n]]
                trends.append(TrendCheck(
                    name=f"constraint_order[{engine},mer_db={mer_db},{constraint}:{low}<{high}]",
                    passed=bool(shared) and not bad,
                    detail=f"violations at N={bad}" if bad else f"{len(shared)} relay counts",
                    cases=len(shared),
                ))
    return trends


# ─── Runner ───────────────────────────────────────────────────


Job = Tuple[Callable[..., List[ResultRow]], Tuple[Any, ...]]


class SweepRunner:
    """
    Executes independent sweep jobs, in a process pool when workers > 1.

    Results are returned in job order regardless of completion order.
    """

    def __init__(self, workers: int = 1, on_done: Callable[[int, int], None] | None = None) -> None:
        self.workers = max(1, int(workers))
        self._on_done = on_done

    async def run(self, jobs: Sequence[Job]) -> List[List[ResultRow]]:
        if self.workers == 1 or len(jobs) <= 1:
            results = []
            for index, (fn, args) in enumerate(jobs):
                results.append(fn(*args))
                self._notify(index, len(jobs))
            return results

        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            tasks = [
                asyncio.create_task(self._run_one(loop, pool, index, fn, args, len(jobs)), name=f"job-{index}")
                for index, (fn, args) in enumerate(jobs)
            ]
            return list(await asyncio.gather(*tasks))

    async def _run_one(self, loop, pool, index, fn, args, total) -> List[ResultRow]:
        rows = await loop.run_in_executor(pool, fn, *args)
        self._notify(index, total)
        return rows

    def _notify(self, index: int, total: int) -> None:
        if self._on_done is not None:
            self._on_done(index, total)


_ROW_BUILDERS = {
    "srt_curve": _srt_point_rows,
    "outage_vs_n": _outage_vs_n_rows,
    "intercept_vs_n": _intercept_vs_n_rows,
}


async def run_sweep(spec: SweepSpec, runner: SweepRunner | None = None) -> SweepResult:
    if spec.kind not in _ROW_BUILDERS:
        raise DomainError(f"sweep kind {spec.kind!r} is not a curve sweep")
    runner = runner or SweepRunner()
    build = _ROW_BUILDERS[spec.kind]
    per_point = await runner.run([(build, (spec, i)) for i in range(len(spec.grid))])
    rows = [row for chunk in per_point for row in chunk]
    if spec.kind == "srt_curve":
        trends = _srt_curve_trends(spec, rows)
    else:
        trends = _versus_n_trends(spec, rows)
    return SweepResult(rows=rows, trends=trends)


def _run_kind(kind: str, spec: SweepSpec, workers: int) -> SweepResult:
    if spec.kind != kind:
        raise DomainError(f"expected a {kind} spec, got {spec.kind}")
    return asyncio.run(run_sweep(spec, SweepRunner(workers)))


def sweep_srt_curve(spec: SweepSpec, workers: int = 1) -> SweepResult:
    return _run_kind("srt_curve", spec, workers)


def sweep_outage_vs_n(spec: SweepSpec, workers: int = 1) -> SweepResult:
    return _run_kind("outage_vs_n", spec, workers)


def sweep_intercept_vs_n(spec: SweepSpec, workers: int = 1) -> SweepResult:
    return _run_kind("intercept_vs_n", spec, workers)
