"""
Machine-readable result artifacts.

Rows are rendered to CSV (header row, `\\n` line endings) or to a JSON
list with the same keys in the same order. Floats use Python's shortest
round-trip repr, so re-running a seeded job yields byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import aiofiles

OUTPUT_DIR_ENV = "SRTSIM_OUTPUT_DIR"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ResultRow:
    """One (scheme, parameters, engine) evaluation."""

    sweep_kind: str
    scheme: str
    n_relays: Optional[int] = None
    mer_db: Optional[float] = None
    rate: Optional[float] = None
    snr_db: Optional[float] = None
    delta: Optional[float] = None
    engine: str = ""
    p_out: Optional[float] = None
    p_int: Optional[float] = None
    ci_out: Optional[float] = None
    ci_int: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    status: str = "ok"


@dataclass(frozen=True)
class CheckRow:
    """One verification check outcome."""

    check: str
    status: str
    max_delta: Optional[float]
    tolerance: Optional[float]
    cases: int
    failing_case: str = ""


def _column_names(row_type: type) -> List[str]:
    return [f.name for f in fields(row_type)]


def format_value(value: Any) -> str:
    """CSV cell text: shortest round-trip floats, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        return None if value != value else float(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return int(value)
    return value


def render_csv(rows: Sequence[Any], row_type: type = ResultRow) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = _column_names(row_type)
    writer.writerow(columns)
    for row in rows:
        record = asdict(row)
        writer.writerow([format_value(record[c]) for c in columns])
    return buffer.getvalue()


def render_json(rows: Sequence[Any], row_type: type = ResultRow) -> str:
    columns = _column_names(row_type)
    records: List[Dict[str, Any]] = []
    for row in rows:
        record = asdict(row)
        records.append({c: _json_value(record[c]) for c in columns})
    return json.dumps(records, indent=2, allow_nan=False) + "\n"


def render(rows: Sequence[Any], output_format: str = "csv", row_type: type = ResultRow) -> str:
    if output_format == "json":
        return render_json(rows, row_type)
    return render_csv(rows, row_type)


def resolve_output_path(out: str | os.PathLike[str]) -> Path:
    """Relative paths land under $SRTSIM_OUTPUT_DIR when it is set."""
    path = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def companion_path(path: Path, tag: str) -> Path:
    """Sibling artifact path: runs/sweep.csv with tag "trends" -> runs/sweep.trends.csv."""
    return path.with_name(f"{path.stem}.{tag}{path.suffix}")


async def write_artifact(text: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "w", encoding="utf-8", newline="") as fh:
        await fh.write(text)
    return path
