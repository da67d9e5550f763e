"""
Console Notifier: human-facing run summaries.

Everything a person reads goes through here; the machine-readable
artifact is written separately by srtsim.results. Numbers are printed
with the same formatting as the artifact so every printed value can be
found in it. ANSI colors are used only when the stream is a terminal.
"""

from __future__ import annotations

import sys
from typing import Optional, Sequence, TextIO

from srtsim.results import CheckRow, ResultRow, format_value

# ANSI color codes for terminal styling
_RESET = "\033[0m"
_BOLD = "\033[1m"
_DIM = "\033[2m"
_RED = "\033[91m"
_GREEN = "\033[92m"
_YELLOW = "\033[93m"
_BLUE = "\033[94m"
_CYAN = "\033[96m"
_GRAY = "\033[90m"

_stream: Optional[TextIO] = None
_debug = False


def configure(stream: Optional[TextIO] = None, debug: bool = False) -> None:
    """Route summaries to `stream` (stdout by default); debug enables progress lines."""
    global _stream, _debug
    _stream = stream
    _debug = debug


def _out() -> TextIO:
    return _stream if _stream is not None else sys.stdout


def _c(code: str, stream: Optional[TextIO] = None) -> str:
    stream = stream or _out()
    return code if getattr(stream, "isatty", lambda: False)() else ""


def _emit(text: str = "", end: str = "\n") -> None:
    stream = _out()
    print(text, end=end, file=stream)


def print_banner(command: str, seed: Optional[int] = None) -> None:
    """Print the run header, including the seed when randomness is involved."""
    seed_note = f"  {_c(_DIM)}seed={seed}{_c(_RESET)}" if seed is not None else ""
    _emit(f"{_c(_BOLD)}{_c(_CYAN)}srtsim {command}{_c(_RESET)}{seed_note}")
    _emit(f"{_c(_DIM)}{'─' * 68}{_c(_RESET)}")


def print_result_table(rows: Sequence[ResultRow]) -> None:
    """One line per row: scheme, relays, engine, outage, intercept, status."""
    header = f"  {'scheme':<6} {'N':>5} {'engine':<17} {'p_out':<24} {'p_int':<24} status"
    _emit(f"{_c(_BOLD)}{header}{_c(_RESET)}")
    for row in rows:
        color = _GREEN if row.status == "ok" else _YELLOW
        p_out = format_value(row.p_out)
        p_int = format_value(row.p_int)
        if row.ci_out is not None:
            p_out += f" ±{format_value(row.ci_out)}"
        if row.ci_int is not None:
            p_int += f" ±{format_value(row.ci_int)}"
        _emit(
            f"  {row.scheme:<6} {format_value(row.n_relays):>5} {row.engine:<17} "
            f"{p_out:<24} {p_int:<24} {_c(color)}{row.status}{_c(_RESET)}"
        )


def print_trend(name: str, passed: bool) -> None:
    if passed:
        _emit(f"  {_c(_GREEN)}PASS{_c(_RESET)} {_c(_DIM)}{name}{_c(_RESET)}")
    else:
        _emit(f"  {_c(_RED)}FAIL{_c(_RESET)} {_c(_BOLD)}{name}{_c(_RESET)}")


def print_check(row: CheckRow) -> None:
    """Print one verification check with its worst deviation and tolerance."""
    color = _GREEN if row.status == "pass" else _RED
    _emit(
        f"  {_c(color)}{row.status.upper():<4}{_c(_RESET)} {_c(_BOLD)}{row.check:<22}{_c(_RESET)}"
        f" max_delta={format_value(row.max_delta)}"
        f"  tolerance={format_value(row.tolerance)}"
        f"  {_c(_DIM)}cases={row.cases}{_c(_RESET)}"
    )
    if row.failing_case:
        _emit(f"       {_c(_GRAY)}failing case: {row.failing_case}{_c(_RESET)}")


def print_verdict(passed: bool) -> None:
    if passed:
        _emit(f"\n  {_c(_BOLD)}{_c(_GREEN)}All checks passed.{_c(_RESET)}")
    else:
        _emit(f"\n  {_c(_BOLD)}{_c(_RED)}Verification failed.{_c(_RESET)}")


def print_artifact_written(path: str, count: int) -> None:
    _emit(f"  {_c(_BLUE)}> wrote{_c(_RESET)} {count} rows to {path}")


def print_progress(done: int, total: int) -> None:
    """Progress heartbeat, shown only at DEBUG level."""
    if not _debug:
        return
    _emit(f"  {_c(_DIM)}[{done}/{total}] jobs done{_c(_RESET)}", end="\r" if done < total else "\n")
    _out().flush()


def print_warning(message: str) -> None:
    print(f"  {_c(_YELLOW, sys.stderr)}⚠  {message}{_c(_RESET, sys.stderr)}", file=sys.stderr)


def print_error(line: str) -> None:
    """Print exactly one machine-parseable line on stderr."""
    print(f"error: {line}", file=sys.stderr)


def print_shutdown() -> None:
    print(f"\n{_c(_BOLD, sys.stderr)}Interrupted.{_c(_RESET, sys.stderr)}", file=sys.stderr)
