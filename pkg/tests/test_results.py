"""
Tests for artifact rendering and writing.
"""

import asyncio
import json
import math

from srtsim.results import (
    CheckRow,
    ResultRow,
    format_value,
    render,
    resolve_output_path,
    write_artifact,
)

ROWS = [
    ResultRow(sweep_kind="dt-srt", scheme="dt", n_relays=0, mer_db=10.0, engine="analytic",
              p_out=0.2056717652757185, p_int=0.1),
    ResultRow(sweep_kind="srt_curve", scheme="ors", n_relays=25, engine="analytic_general",
              status="error:capacity"),
]


class TestFormatting:
    def test_shortest_round_trip(self):
        assert format_value(0.1) == "0.1"
        assert float(format_value(1 / 3)) == 1 / 3

    def test_missing(self):
        assert format_value(None) == ""

    def test_integers(self):
        assert format_value(25) == "25"


class TestCsv:
    def test_header_and_rows(self):
        lines = render(ROWS).split("\n")
        assert lines[0].startswith("sweep_kind,scheme,n_relays,mer_db,rate,snr_db,delta,engine,p_out,p_int")
        assert lines[0].endswith("trials,seed,status")
        assert lines[1] == "dt-srt,dt,0,10.0,,,,analytic,0.2056717652757185,0.1,,,,,ok"
        assert lines[2].endswith(",error:capacity")
        assert lines[3] == ""

    def test_deterministic(self):
        assert render(ROWS) == render(list(ROWS))

    def test_check_rows(self):
        text = render([CheckRow("quadrature", "pass", 1e-12, 1e-8, 150)], row_type=CheckRow)
        assert text == "check,status,max_delta,tolerance,cases,failing_case\nquadrature,pass,1e-12,1e-08,150,\n"


class TestJson:
    def test_same_keys_in_order(self):
        records = json.loads(render(ROWS, "json"))
        assert list(records[0]) == list(ResultRow.__dataclass_fields__)
        assert records[0]["p_out"] == 0.2056717652757185
        assert records[1]["p_out"] is None

    def test_nan_becomes_null(self):
        row = ResultRow(sweep_kind="mc", scheme="ors", p_out=math.nan)
        assert json.loads(render([row], "json"))[0]["p_out"] is None


class TestWriting:
    def test_relative_path_under_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SRTSIM_OUTPUT_DIR", str(tmp_path))
        assert resolve_output_path("runs/a.csv") == tmp_path / "runs" / "a.csv"

    def test_absolute_path_untouched(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SRTSIM_OUTPUT_DIR", "/elsewhere")
        assert resolve_output_path(tmp_path / "a.csv") == tmp_path / "a.csv"

    def test_without_output_dir(self, monkeypatch):
        monkeypatch.delenv("SRTSIM_OUTPUT_DIR", raising=False)
        assert str(resolve_output_path("a.csv")) == "a.csv"

    def test_write_creates_parents(self, tmp_path):
        path = tmp_path / "deep" / "dir" / "rows.csv"
        text = render(ROWS)
        assert asyncio.run(write_artifact(text, path)) == path
        assert path.read_text() == text
