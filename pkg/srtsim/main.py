"""
Main entry point: the srtsim command line.

Binds run configs and flags to the analytic, Monte Carlo and experiment
engines, writes the resulting rows as CSV or JSON, and maps failures to
exit statuses:
  0  success
  1  domain, config, capacity, infeasibility or numerical error
  2  verification failure, or a sweep whose expected trends did not hold

Usage:
    python -m srtsim dt-srt --mer-db 10 --p-int 0.1
    python -m srtsim verify --seed 42 --trials 1000000 --out verify.csv
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from srtsim import notifier
from srtsim.analytic_dt import dt_intercept_from_outage, dt_srt, dt_srt_curve
from srtsim.analytic_iid import (
    iid_intercept,
    iid_intercept_limit,
    iid_outage,
    intercept_asymptotic,
    intercept_from_outage_finite,
    outage_from_intercept_asymptotic,
    relays_required,
    solve_outage_given_intercept_finite,
)
from srtsim.analytic_ors import ors_srt
from srtsim.config import (
    GAIN_KEYS,
    as_list,
    load_config,
    load_gains_file,
    load_run_config,
    merge_values,
    require_keys,
    resolve_float,
    resolve_iid,
    resolve_int,
    resolve_mer,
    resolve_profile,
    resolve_system,
    resolve_workers,
)
from srtsim.errors import CapacityError, ConfigError, SrtError
from srtsim.experiments import (
    ENGINES,
    KINDS,
    VARIABLES,
    SweepRunner,
    SweepSpec,
    default_grid,
    log_grid,
    relay_grid,
    run_sweep,
)
from srtsim.models import ChannelProfile, IidProfile, RunSettings, db_from_linear, mer_from_db
from srtsim.montecarlo import estimate_status, simulate
from srtsim.results import (
    CheckRow,
    ResultRow,
    companion_path,
    render,
    resolve_output_path,
    write_artifact,
)
from srtsim.verify import verify_suite

COMMANDS = ("dt-srt", "ors-exact", "ors-iid", "solve", "mc", "sweep", "verify", "relays")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY_FAILED = 2

_MER = ("mer", "mer_db")
_THRESHOLD = ("delta", "rate")

# Key groups each command needs; one key per group must be present.
_REQUIRED: Dict[str, List[Tuple[str, ...]]] = {
    "dt-srt": [_MER + ("sigma_se2",), ("p_int", "p_out") + _THRESHOLD],
    "ors-exact": [_MER + ("sigma_se2",), ("n_relays", "sigma_si2"), _THRESHOLD],
    "ors-iid": [_MER, ("n_relays",), ("p_out",) + _THRESHOLD],
    "solve": [_MER, ("n_relays",), ("p_int",)],
    "mc": [_MER + ("sigma_se2",), _THRESHOLD],
    "sweep": [],
    "verify": [],
    "relays": [("p_out_max",), ("p_int_max",), _MER],
}

# Flag destinations that are not run-config keys.
_NON_CONFIG = {"command", "config_path", "gains_file", "settings_path", "out", "format"}


class _Parser(argparse.ArgumentParser):
    """Argument errors become ConfigError so they exit with status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", dest="config_path", help="flat JSON/YAML run config")
    common.add_argument("--gains-file", help="per-link average gains (JSON/YAML)")
    common.add_argument("--rate", type=float, help="data rate, bit/s/Hz")
    common.add_argument("--snr", type=float, help="linear SNR P/N0")
    common.add_argument("--snr-db", type=float)
    common.add_argument("--mer", type=float, nargs="+", help="linear main-to-eavesdropper ratio")
    common.add_argument("--mer-db", type=float, nargs="+")
    common.add_argument("--n-relays", type=int, nargs="+")
    common.add_argument("--delta", type=float, help="relay decoding threshold")
    common.add_argument("--p-int", type=float, nargs="+", help="intercept level(s)")
    common.add_argument("--p-out", type=float, nargs="+", help="outage level(s)")
    common.add_argument("--p-out-max", type=float)
    common.add_argument("--p-int-max", type=float)
    common.add_argument("--n-max", type=int)
    common.add_argument("--scheme", choices=("dt", "ors"))
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--confidence", type=float)
    common.add_argument("--kind", choices=[k for k in KINDS if k != "verify"])
    common.add_argument("--engines", nargs="+", choices=ENGINES)
    common.add_argument("--variable", choices=VARIABLES)
    common.add_argument("--grid-min", type=float)
    common.add_argument("--grid-max", type=float)
    common.add_argument("--grid-points", type=int)
    common.add_argument("--out", help="artifact path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="srtsim", description="Security-reliability tradeoff of relay selection.")
    parser.add_argument("--settings", dest="settings_path", help="settings file (default: config.yaml)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def collect_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Run-config file, then gains file, then flags; later layers win."""
    file_values = load_run_config(args.config_path) if args.config_path else {}
    gains = load_gains_file(args.gains_file) if args.gains_file else {}
    flags = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    return merge_values(file_values, gains, flags)


def check_required(command: str, values: Dict[str, Any]) -> None:
    groups = list(_REQUIRED[command])
    if command == "mc" and values.get("scheme", "ors") == "ors":
        groups.append(("n_relays", "sigma_si2"))
    if "rate" in values and "delta" not in values:
        groups.append(("snr", "snr_db", "power"))
    require_keys(values, groups)


# ─── Commands ─────────────────────────────────────────────────


def _dt_gains(values: Dict[str, Any]) -> Tuple[float, float]:
    """(sigma_sd2, sigma_se2): explicit gains, or unit main gain at the given MER."""
    if "sigma_se2" in values:
        require_keys(values, [("sigma_sd2",)])
        return resolve_float(values, "sigma_sd2"), resolve_float(values, "sigma_se2")
    return 1.0, 1.0 / resolve_mer(values)


def run_dt_srt(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    sd, se = _dt_gains(values)
    base = dict(sweep_kind="dt-srt", scheme="dt", n_relays=0, mer_db=db_from_linear(sd / se), engine="analytic")
    if "p_int" in values:
        curve = dt_srt_curve([float(p) for p in as_list(values, "p_int")], se, sd)
        return [ResultRow(p_out=pt.p_out, p_int=pt.p_int, **base) for pt in curve]
    if "p_out" in values:
        return [
            ResultRow(p_out=float(p), p_int=dt_intercept_from_outage(float(p), se, sd), **base)
            for p in as_list(values, "p_out")
        ]
    system = resolve_system(values)
    result = dt_srt(ChannelProfile(sd, se), system.alpha)
    return [ResultRow(rate=system.rate, snr_db=system.snr_db, delta=system.delta,
                      p_out=result.p_out, p_int=result.p_int, **base)]


def run_ors_exact(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    profile = resolve_profile(values)
    system = resolve_system(values)
    point = ors_srt(profile, system.delta, cap=settings.enumeration_cap)
    return [ResultRow(
        sweep_kind="ors-exact", scheme="ors", n_relays=profile.n_relays,
        mer_db=db_from_linear(profile.mer), rate=system.rate, snr_db=system.snr_db,
        delta=system.delta, engine="analytic_general", p_out=point.p_out, p_int=point.p_int,
    )]


def run_ors_iid(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    iid = resolve_iid(values)
    n, mer = iid.n_relays, iid.mer
    base = dict(sweep_kind="ors-iid", scheme="ors", n_relays=n, mer_db=db_from_linear(mer))
    rows: List[ResultRow] = []
    if "p_out" in values:
        for p in as_list(values, "p_out"):
            p = float(p)
            rows.append(ResultRow(engine="analytic_iid", p_out=p, p_int=intercept_from_outage_finite(p, n, mer), **base))
            rows.append(ResultRow(engine="asymptotic", p_out=p, p_int=intercept_asymptotic(p, n, mer), **base))
        return rows
    system = resolve_system(values)
    delta = system.delta
    point = dict(rate=system.rate, snr_db=system.snr_db, delta=delta, p_out=iid_outage(n, iid.sigma_m2, delta))
    rows.append(ResultRow(engine="analytic_iid", p_int=iid_intercept(n, iid.sigma_m2, iid.sigma_e2, delta), **point, **base))
    rows.append(ResultRow(engine="asymptotic", p_int=iid_intercept_limit(iid.sigma_e2, delta), **point, **base))
    return rows


def run_solve(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    iid = resolve_iid(values)
    n, mer = iid.n_relays, iid.mer
    base = dict(sweep_kind="solve", scheme="ors", n_relays=n, mer_db=db_from_linear(mer))
    rows: List[ResultRow] = []
    for p in as_list(values, "p_int"):
        p = float(p)
        rows.append(ResultRow(engine="analytic_iid", p_int=p, p_out=solve_outage_given_intercept_finite(p, n, mer), **base))
        rows.append(ResultRow(engine="asymptotic", p_int=p, p_out=outage_from_intercept_asymptotic(p, n, mer), **base))
    return rows


def run_mc(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    scheme = values.get("scheme", "ors")
    system = resolve_system(values)
    if scheme == "dt" and not any(k in values for k in GAIN_KEYS):
        profile = IidProfile.from_mer(resolve_mer(values), 1).expand()
    else:
        profile = resolve_profile(values)
    trials = resolve_int(values, "trials") if "trials" in values else settings.trials
    seed = resolve_int(values, "seed") if "seed" in values else settings.seed
    confidence = resolve_float(values, "confidence") if "confidence" in values else settings.confidence
    workers = resolve_workers(values.get("workers", settings.workers))

    est_out, est_int = simulate(scheme, system, profile, trials, seed, workers, confidence)
    n = profile.n_relays if scheme == "ors" else 0
    base = dict(sweep_kind="mc", scheme=scheme, n_relays=n, mer_db=db_from_linear(profile.mer),
                rate=system.rate, snr_db=system.snr_db, delta=system.delta)
    rows = [ResultRow(engine="mc", p_out=est_out.p_hat, p_int=est_int.p_hat,
                      ci_out=est_out.ci_half_width, ci_int=est_int.ci_half_width,
                      trials=trials, seed=seed, status=estimate_status(est_out, est_int), **base)]
    if scheme == "dt":
        reference = dt_srt(profile, system.alpha)
        rows.append(ResultRow(engine="analytic", p_out=reference.p_out, p_int=reference.p_int, **base))
    else:
        try:
            point = ors_srt(profile, system.delta, cap=settings.enumeration_cap)
            rows.append(ResultRow(engine="analytic_general", p_out=point.p_out, p_int=point.p_int, **base))
        except CapacityError as exc:
            notifier.print_warning(str(exc))
    return rows


def build_sweep_spec(values: Dict[str, Any], settings: RunSettings) -> SweepSpec:
    kind = values.get("kind", "srt_curve")
    variable = values.get("variable", "delta")
    if kind not in KINDS or kind == "verify":
        raise ConfigError(f"sweep kind must be one of srt_curve, outage_vs_n, intercept_vs_n, got {kind!r}")

    if "grid_min" in values or "grid_max" in values:
        require_keys(values, [("grid_min",), ("grid_max",)])
        points = resolve_int(values, "grid_points") if "grid_points" in values else 41
        low, high = resolve_float(values, "grid_min"), resolve_float(values, "grid_max")
        grid = log_grid(low, high, points) if kind == "srt_curve" else relay_grid(int(low), int(high), points)
    else:
        grid = default_grid(kind)

    fixed: Dict[str, Any] = {}
    if "mer" in values and "mer_db" in values:
        raise ConfigError("give only one of mer, mer_db")
    if "mer_db" in values:
        fixed["mer_db"] = [float(v) for v in as_list(values, "mer_db")]
    elif "mer" in values:
        fixed["mer_db"] = [db_from_linear(float(v)) for v in as_list(values, "mer")]
    for mer_db in fixed.get("mer_db", []):
        mer_from_db(mer_db)
    if "n_relays" in values:
        fixed["n_relays"] = [int(v) for v in as_list(values, "n_relays")]
    for key in ("p_int", "p_out"):
        if key in values:
            fixed[key] = [float(v) for v in as_list(values, key)]
    if "rate" in values:
        fixed["rate"] = resolve_float(values, "rate")
    if "snr_db" in values or "snr" in values:
        snr_db = (resolve_float(values, "snr_db") if "snr_db" in values
                  else db_from_linear(resolve_float(values, "snr")))
        fixed["snr_db"] = snr_db

    options: Dict[str, Any] = dict(
        trials=resolve_int(values, "trials") if "trials" in values else settings.trials,
        seed=resolve_int(values, "seed") if "seed" in values else settings.seed,
        confidence=resolve_float(values, "confidence") if "confidence" in values else settings.confidence,
        enumeration_cap=settings.enumeration_cap,
    )
    if "engines" in values:
        options["engines"] = tuple(as_list(values, "engines"))
    return SweepSpec(kind=kind, grid=grid, fixed=fixed, variable=variable, **options)


def run_relays(values: Dict[str, Any], settings: RunSettings) -> List[ResultRow]:
    mer = resolve_mer(values)
    p_out_max = resolve_float(values, "p_out_max")
    p_int_max = resolve_float(values, "p_int_max")
    n_max = resolve_int(values, "n_max") if "n_max" in values else 10_000
    n = relays_required(p_out_max, p_int_max, mer, n_max)
    return [ResultRow(
        sweep_kind="relays", scheme="ors", n_relays=n, mer_db=db_from_linear(mer),
        engine="analytic_iid", p_out=p_out_max, p_int=intercept_from_outage_finite(p_out_max, n, mer),
    )]


_SIMPLE: Dict[str, Callable[[Dict[str, Any], RunSettings], List[ResultRow]]] = {
    "dt-srt": run_dt_srt,
    "ors-exact": run_ors_exact,
    "ors-iid": run_ors_iid,
    "solve": run_solve,
    "mc": run_mc,
    "relays": run_relays,
}


# ─── Orchestration ────────────────────────────────────────────


async def _emit_artifact(
    rows: Sequence[Any],
    row_type: type,
    args: argparse.Namespace,
    settings: RunSettings,
    companion: Optional[str] = None,
) -> None:
    text = render(rows, args.format or settings.output_format, row_type)
    if args.out:
        path = resolve_output_path(args.out)
        if companion:
            path = companion_path(path, companion)
        path = await write_artifact(text, path)
        notifier.print_artifact_written(str(path), len(rows))
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


async def _run_command(args: argparse.Namespace, settings: RunSettings) -> int:
    values = collect_values(args)
    check_required(args.command, values)
    seed = resolve_int(values, "seed") if "seed" in values else settings.seed
    uses_seed = args.command in ("mc", "verify") or (
        args.command == "sweep" and "mc" in values.get("engines", ())
    )
    notifier.print_banner(args.command, seed if uses_seed else None)

    if args.command in _SIMPLE:
        rows = _SIMPLE[args.command](values, settings)
        notifier.print_result_table(rows)
        await _emit_artifact(rows, ResultRow, args, settings)
        return EXIT_OK

    if args.command == "sweep":
        spec = build_sweep_spec(values, settings)
        finished = 0

        def progress(_index: int, total: int) -> None:
            nonlocal finished
            finished += 1
            notifier.print_progress(finished, total)

        workers = resolve_workers(values.get("workers", settings.workers))
        result = await run_sweep(spec, SweepRunner(workers, on_done=progress))
        notifier.print_result_table(result.rows)
        for trend in result.trends:
            notifier.print_trend(trend.name, trend.passed)
        if not result.trends_passed:
            notifier.print_warning("some expected trends did not hold")
        await _emit_artifact(result.rows, ResultRow, args, settings)
        if args.out:
            trend_rows = [trend.as_row() for trend in result.trends]
            await _emit_artifact(trend_rows, CheckRow, args, settings, companion="trends")
        return EXIT_OK if result.trends_passed else EXIT_VERIFY_FAILED

    # verify
    trials = resolve_int(values, "trials") if "trials" in values else settings.trials
    confidence = resolve_float(values, "confidence") if "confidence" in values else settings.confidence
    workers = resolve_workers(values.get("workers", settings.workers))
    report = verify_suite(
        seed, trials, workers=workers, confidence=confidence,
        on_check=lambda check: notifier.print_check(check.as_row()),
    )
    notifier.print_verdict(report.passed)
    await _emit_artifact(report.rows(), CheckRow, args, settings)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


async def async_main(argv: Optional[Sequence[str]] = None) -> int:
    """Async entry point; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        settings = load_config(args.settings_path)
        # Summaries share stdout only when the artifact goes to a file.
        notifier.configure(sys.stdout if args.out else sys.stderr, debug=settings.debug)
        return await _run_command(args, settings)
    except SrtError as exc:
        notifier.print_error(exc.one_line())
        return EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Sync entry point."""
    try:
        code = asyncio.run(async_main(argv))
    except KeyboardInterrupt:
        notifier.print_shutdown()
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    main()
