"""
Tests for the experiment sweeps, their trend postconditions and the runner.
"""

import asyncio

import pytest

from srtsim.errors import DomainError
from srtsim.experiments import (
    SweepRunner,
    SweepSpec,
    default_grid,
    intercept_at_outage,
    log_grid,
    relay_grid,
    run_sweep,
    sweep_intercept_vs_n,
    sweep_outage_vs_n,
    sweep_srt_curve,
)

MER_10DB = 10.0
MER_5DB = 10 ** 0.5


# ─── Specs ────────────────────────────────────────────────────


class TestSweepSpec:
    def test_defaults_are_merged(self):
        spec = SweepSpec(kind="outage_vs_n", grid=(1, 2))
        assert spec.list_of("p_int") == [0.1, 0.01, 0.001]
        assert spec.list_of("mer_db") == [5.0]

    def test_override_keeps_other_defaults(self):
        spec = SweepSpec(kind="srt_curve", grid=(0.1,), fixed={"n_relays": [3]})
        assert spec.list_of("n_relays") == [3.0]
        assert spec.list_of("mer_db") == [10.0]

    def test_scalar_binding(self):
        spec = SweepSpec(kind="intercept_vs_n", grid=(1,), fixed={"p_out": 0.05})
        assert spec.list_of("p_out") == [0.05]

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="ber_curve", grid=(1.0,))

    def test_unknown_engine(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="srt_curve", grid=(1.0,), engines=("guess",))

    def test_unknown_variable(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="srt_curve", grid=(1.0,), variable="power")

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="srt_curve", grid=())

    def test_grid_must_increase(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="srt_curve", grid=(0.1, 0.1))

    def test_constraint_range(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="outage_vs_n", grid=(1,), fixed={"p_int": [1.0]})

    def test_relay_grid_integers(self):
        with pytest.raises(DomainError):
            SweepSpec(kind="outage_vs_n", grid=(1.0, 2.5))


class TestGrids:
    def test_log_grid_endpoints(self):
        grid = log_grid(1e-4, 10.0, 41)
        assert len(grid) == 41
        assert grid[0] == pytest.approx(1e-4)
        assert grid[-1] == pytest.approx(10.0)

    def test_relay_grid_distinct_integers(self):
        grid = relay_grid(1, 10_000, 41)
        assert grid[0] == 1.0 and grid[-1] == 10_000.0
        assert all(b > a for a, b in zip(grid, grid[1:]))
        assert all(v == int(v) for v in grid)

    def test_default_outage_grid(self):
        assert default_grid("outage_vs_n") == tuple(float(2 ** k) for k in range(11))

    def test_bad_log_grid(self):
        with pytest.raises(DomainError):
            log_grid(1.0, 0.1, 5)


# ─── Curve helpers ────────────────────────────────────────────


class TestInterceptAtOutage:
    def test_dt_inverse(self):
        assert intercept_at_outage("dt", 0.2056718, 0, MER_10DB) == pytest.approx(0.1, rel=1e-5)

    @pytest.mark.parametrize("p_out", [1e-3, 1e-2, 1e-1])
    def test_relays_beat_direct_transmission(self, p_out):
        dt = intercept_at_outage("dt", p_out, 0, MER_10DB)
        two = intercept_at_outage("ors", p_out, 2, MER_10DB)
        four = intercept_at_outage("ors", p_out, 4, MER_10DB)
        assert dt > two > four

    def test_higher_mer_lowers_intercept(self):
        assert intercept_at_outage("ors", 0.01, 4, 10 ** 1.2) < intercept_at_outage("ors", 0.01, 4, MER_10DB)


# ─── srt_curve ────────────────────────────────────────────────


class TestSrtCurve:
    SPEC = SweepSpec(kind="srt_curve", grid=(0.01, 0.1, 1.0), fixed={"n_relays": [2, 4]})

    def test_row_count(self):
        result = sweep_srt_curve(self.SPEC)
        # per point: one DT row plus three engines for each of two relay counts
        assert len(result.rows) == 3 * (1 + 2 * 3)

    def test_general_matches_iid(self):
        rows = sweep_srt_curve(self.SPEC).rows
        general = {(r.delta, r.n_relays): r for r in rows if r.engine == "analytic_general"}
        iid = {(r.delta, r.n_relays): r for r in rows if r.engine == "analytic_iid"}
        assert general.keys() == iid.keys()
        for key, row in general.items():
            assert row.p_out == pytest.approx(iid[key].p_out, rel=1e-10)
            assert row.p_int == pytest.approx(iid[key].p_int, rel=1e-10)

    def test_dt_rows(self):
        rows = [r for r in sweep_srt_curve(self.SPEC).rows if r.scheme == "dt"]
        assert [r.engine for r in rows] == ["analytic"] * 3
        assert all(r.n_relays == 0 and r.mer_db == 10.0 for r in rows)

    def test_trends_pass(self):
        result = sweep_srt_curve(self.SPEC)
        assert result.trends_passed, [t for t in result.trends if not t.passed]
        names = {t.name.split("[")[0] for t in result.trends}
        assert names == {"srt_order", "threshold_tradeoff"}

    def test_mer_order_with_two_ratios(self):
        spec = SweepSpec(kind="srt_curve", grid=(0.1,), fixed={"n_relays": [2], "mer_db": [10.0, 12.0]})
        result = sweep_srt_curve(spec)
        mer_trends = [t for t in result.trends if t.name.startswith("mer_order")]
        assert mer_trends and all(t.passed for t in mer_trends)

    def test_over_capacity_is_a_row_status(self):
        spec = SweepSpec(
            kind="srt_curve", grid=(0.1,), fixed={"n_relays": [25]},
            engines=("analytic_general", "analytic_iid"),
        )
        rows = {r.engine: r for r in sweep_srt_curve(spec).rows if r.scheme == "ors"}
        assert rows["analytic_general"].status == "error:capacity"
        assert rows["analytic_general"].p_out is None
        assert rows["analytic_iid"].status == "ok"

    def test_custom_enumeration_cap(self):
        spec = SweepSpec(
            kind="srt_curve", grid=(0.1,), fixed={"n_relays": [2, 4]},
            engines=("analytic_general",), enumeration_cap=3,
        )
        status = {r.n_relays: r.status for r in sweep_srt_curve(spec).rows if r.scheme == "ors"}
        assert status == {2: "ok", 4: "error:capacity"}

    def test_rate_variable(self):
        spec = SweepSpec(kind="srt_curve", grid=(0.5, 1.0, 2.0), variable="rate", fixed={"n_relays": [2]})
        rows = [r for r in sweep_srt_curve(spec).rows if r.engine == "analytic_iid"]
        assert [r.rate for r in rows] == pytest.approx([0.5, 1.0, 2.0])
        assert all(r.snr_db == pytest.approx(0.0) for r in rows)

    def test_mc_rows(self):
        spec = SweepSpec(
            kind="srt_curve", grid=(0.1,), fixed={"n_relays": [2]},
            engines=("mc",), trials=20_000, seed=5,
        )
        rows = sweep_srt_curve(spec).rows
        assert [(r.scheme, r.engine) for r in rows] == [("dt", "mc"), ("ors", "mc")]
        for row in rows:
            assert row.trials == 20_000 and row.seed == 5
            assert row.ci_out is not None and row.ci_int is not None

    def test_workers_do_not_change_rows(self):
        serial = sweep_srt_curve(self.SPEC, workers=1)
        parallel = sweep_srt_curve(self.SPEC, workers=2)
        assert serial.rows == parallel.rows

    def test_wrong_kind(self):
        with pytest.raises(DomainError):
            sweep_srt_curve(SweepSpec(kind="outage_vs_n", grid=(1,)))


# ─── outage_vs_n ──────────────────────────────────────────────


class TestOutageVsN:
    def test_default_grid_trends(self):
        result = sweep_outage_vs_n(SweepSpec(kind="outage_vs_n", grid=default_grid("outage_vs_n")))
        assert result.trends_passed, [t for t in result.trends if not t.passed]
        assert all(r.status == "ok" for r in result.rows)

    def test_hundred_relays(self):
        spec = SweepSpec(kind="outage_vs_n", grid=(1, 10, 100), fixed={"p_int": [0.1]})
        rows = {(r.engine, r.n_relays): r.p_out for r in sweep_outage_vs_n(spec).rows}
        assert rows[("asymptotic", 100)] == pytest.approx(6.2e-8, rel=0.05)
        assert rows[("analytic_iid", 100)] == pytest.approx(rows[("asymptotic", 100)], rel=0.01)
        assert rows[("asymptotic", 10)] == pytest.approx(0.19025, rel=2e-3)

    def test_general_engine_maps_to_iid(self):
        spec = SweepSpec(kind="outage_vs_n", grid=(1, 2), engines=("analytic_general",), fixed={"p_int": [0.1]})
        assert {r.engine for r in sweep_outage_vs_n(spec).rows} == {"analytic_iid"}


# ─── intercept_vs_n ───────────────────────────────────────────


class TestInterceptVsN:
    def test_trends(self):
        spec = SweepSpec(kind="intercept_vs_n", grid=relay_grid(1, 10_000, 9))
        result = sweep_intercept_vs_n(spec)
        assert result.trends_passed, [t for t in result.trends if not t.passed]

    def test_looser_outage_lowers_intercept(self):
        spec = SweepSpec(kind="intercept_vs_n", grid=(4,), engines=("analytic_iid",))
        rows = sorted(sweep_intercept_vs_n(spec).rows, key=lambda r: r.p_out)
        values = [r.p_int for r in rows]
        assert values == sorted(values, reverse=True)

    def test_asymptotic_value(self):
        spec = SweepSpec(kind="intercept_vs_n", grid=(10,), engines=("asymptotic",),
                         fixed={"p_out": [0.1], "mer_db": [10.0]})
        (row,) = sweep_intercept_vs_n(spec).rows
        assert row.p_int == pytest.approx(7.3591e-4, rel=1e-4)


# ─── Runner ───────────────────────────────────────────────────


def _square(x):
    return [x * x]


class TestSweepRunner:
    def test_order_and_progress(self):
        seen = []
        runner = SweepRunner(workers=1, on_done=lambda i, total: seen.append((i, total)))
        results = asyncio.run(runner.run([(_square, (k,)) for k in range(4)]))
        assert results == [[0], [1], [4], [9]]
        assert seen == [(0, 4), (1, 4), (2, 4), (3, 4)]

    def test_pool_keeps_order(self):
        results = asyncio.run(SweepRunner(workers=2).run([(_square, (k,)) for k in range(6)]))
        assert results == [[k * k] for k in range(6)]

    def test_verify_is_not_a_curve(self):
        with pytest.raises(DomainError):
            asyncio.run(run_sweep(SweepSpec(kind="verify", grid=(1.0,))))
