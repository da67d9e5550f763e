"""
Tests for the cross-verification checks.

Each check is run at reduced case counts; the perturbed runs confirm the
equality checks actually detect a wrong gain.
"""

import json

import numpy as np
import pytest

from srtsim.errors import DomainError
from srtsim.models import DecodingSet
from srtsim.verify import (
    CheckResult,
    VerificationReport,
    check_dt_round_trip,
    check_iid_vs_general,
    check_mc_containment,
    check_outage_intercept_relation,
    check_selection_laws,
    quadrature_pr_best_is,
    verify_suite,
)

PERTURB = 1e-6


@pytest.fixture
def rng():
    return np.random.default_rng(11)


# ─── Quadrature oracle ────────────────────────────────────────


class TestQuadrature:
    def test_singleton(self):
        assert quadrature_pr_best_is(DecodingSet.from_members([0], 1), 0, [1.0]) == pytest.approx(1.0, abs=1e-10)

    def test_equal_pair(self):
        dset = DecodingSet.from_members([0, 1], 2)
        assert quadrature_pr_best_is(dset, 0, [1.5, 1.5]) == pytest.approx(0.5, abs=1e-10)

    def test_stronger_relay(self):
        dset = DecodingSet.from_members([0, 1], 2)
        assert quadrature_pr_best_is(dset, 0, [2.0, 1.0]) == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_not_a_member(self):
        with pytest.raises(DomainError):
            quadrature_pr_best_is(DecodingSet.from_members([0], 2), 1, [1.0, 1.0])


# ─── Individual checks ────────────────────────────────────────


class TestChecks:
    def test_dt_round_trip(self, rng):
        result = check_dt_round_trip(rng, cases=50)
        assert result.passed
        assert result.cases == 50

    def test_iid_vs_general(self, rng):
        result = check_iid_vs_general(rng, per_n=5)
        assert result.passed, result.worst_case
        assert result.cases == 30

    def test_iid_vs_general_detects_perturbation(self, rng):
        result = check_iid_vs_general(rng, perturb=PERTURB, per_n=5)
        assert not result.passed
        assert result.max_delta > result.tolerance

    def test_outage_intercept(self, rng):
        assert check_outage_intercept_relation(rng, cases=50).passed

    def test_outage_intercept_detects_perturbation(self, rng):
        assert not check_outage_intercept_relation(rng, perturb=PERTURB, cases=50).passed

    def test_selection_laws(self, rng):
        results = check_selection_laws(rng, profiles=10)
        assert [r.name for r in results] == ["selection_law", "quadrature", "printed_form", "enumeration_vs_tables"]
        for result in results:
            assert result.passed, (result.name, result.max_delta, result.worst_case)

    def test_printed_form_detects_perturbation(self, rng):
        _, _, printed, tables = check_selection_laws(rng, perturb=PERTURB, profiles=10)
        assert not printed.passed
        assert tables.passed


class TestMcContainment:
    def test_passes(self):
        result = check_mc_containment(trials=100_000, seed=42)
        assert result.passed
        assert result.cases == 64
        assert result.tolerance == 1.0

    def test_independent_of_workers(self):
        serial = check_mc_containment(trials=100_000, seed=3, workers=1)
        parallel = check_mc_containment(trials=100_000, seed=3, workers=2)
        assert serial.max_delta == parallel.max_delta
        assert serial.worst_case == parallel.worst_case


# ─── Report ───────────────────────────────────────────────────


class TestReport:
    def test_row_of_failed_check(self):
        check = CheckResult("demo", tolerance=0.1)
        check.observe(0.05, {"n": 1})
        check.observe(0.5, {"n": 2})
        row = check.finish().as_row()
        assert row.status == "fail"
        assert row.max_delta == 0.5
        assert json.loads(row.failing_case) == {"n": 2}

    def test_row_of_passed_check(self):
        check = CheckResult("demo", tolerance=0.1)
        check.observe(0.05, {"n": 1})
        row = check.finish().as_row()
        assert row.status == "pass"
        assert row.failing_case == ""

    def test_lookup(self):
        report = VerificationReport([CheckResult("a", 1.0).finish(), CheckResult("b", 1.0).finish()])
        assert report["b"].name == "b"
        assert report.passed
        with pytest.raises(KeyError):
            report["c"]

    def test_too_few_trials(self):
        with pytest.raises(DomainError):
            verify_suite(seed=1, trials=99_999)
