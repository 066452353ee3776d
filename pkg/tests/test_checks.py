"""Tests for the verification suites and the check report."""

import json
from unittest.mock import patch

import numpy as np
import pytest

from rotational_geodesics import checks
from rotational_geodesics.checks import (
    CheckContext,
    check_conservation,
    check_curvature,
    check_determinism,
    check_energy,
    check_isometry,
    check_killing,
    check_quadrature,
    check_spaceform,
    geodesic_profile,
    random_unit_state,
    run_checks,
)
from rotational_geodesics.clairaut import quadrature_constant
from rotational_geodesics.exceptions import DegenerateFrame
from rotational_geodesics.metric3 import metric_from_profile
from rotational_geodesics.models import FormulaVariant, SuiteResult, SurfaceFamily


def make_context(seed: int = 3, variant: FormulaVariant = FormulaVariant.CORRECTED) -> CheckContext:
    return CheckContext(rng=np.random.default_rng(seed), variant=variant)


class TestHelpers:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_random_unit_state(self, fam):
        metric = metric_from_profile(geodesic_profile(fam), arclength_normalized=True)
        state = random_unit_state(np.random.default_rng(1), fam, metric)
        assert quadrature_constant(metric, state) == pytest.approx(-1.0)
        assert 0.2 <= state.t <= 1.0


class TestSuites:
    def test_killing(self):
        result = check_killing(make_context())
        assert result.passed
        assert result.details["negative_control_entry"] == -2.0

    def test_isometry(self):
        result = check_isometry(make_context())
        assert result.passed
        assert result.details["max_inner_error"] < 1e-12

    def test_spaceform(self):
        result = check_spaceform(make_context())
        assert result.passed
        assert result.details["S14"]["expected"] == "pseudo_sphere"

    def test_curvature(self, fake_settings):
        ctx = make_context()
        result = check_curvature(ctx)
        assert result.passed
        for fam in SurfaceFamily:
            assert result.details[fam.value]["samples"] == fake_settings.check_curvature_samples
            assert result.details[fam.value]["max_deviation_from_exact_jets"] <= checks.EXACT_JET_TOLERANCE
            entry = ctx.fixture["curvature"][fam.value][0]
            assert {"corrected", "verbatim", "oracle", "readings"} <= set(entry)
        s56 = ctx.fixture["curvature"]["S56"][0]["readings"]
        assert set(s56) == {"squared", "unsquared"}
        assert set(ctx.fixture["curvature"]["S14"][0]["readings"]) == {"printed"}
        assert set(result.details["S56"]["printed_K_matches"]) == {"squared", "unsquared"}
        for reading in s56.values():
            assert isinstance(reading["K_matches_oracle"], bool)
            assert set(reading["matching_terms"]) <= {"K_meridian", "K_profile", "H_e3", "H_e4"}

    def test_conservation(self):
        with patch.object(checks.settings, "check_step", 1e-3), \
                patch.object(checks.settings, "check_geodesics_per_family", 5):
            result = check_conservation(make_context())
        assert result.passed
        for fam in SurfaceFamily:
            assert result.details[fam.value]["trajectories"] == 5
            assert result.details[fam.value]["early_terminations"] == 0
        assert result.details["step_halving"]["ratio"] >= checks.STEP_HALVING_RATIO

    def test_quadrature(self):
        with patch.object(checks.settings, "check_geodesics_per_family", 30):
            result = check_quadrature(make_context())
        assert result.passed
        assert result.details["imaginary_detection_mismatches"] == 0
        assert type(result.details["imaginary_detection_mismatches"]) is int
        for fam in SurfaceFamily:
            assert result.details[fam.value]["samples"] > 0

    def test_energy(self):
        ctx = make_context(variant=FormulaVariant.VERBATIM)
        result = check_energy(ctx)
        assert result.passed
        variants = result.details["S23"]["variants"]
        assert variants["corrected"]["zeroes_residual"] is True
        assert variants["verbatim"]["zeroes_residual"] is False
        assert result.details["S23"]["reported"] == variants["verbatim"]
        assert "energy_relation" in ctx.fixture

    def test_determinism(self):
        result = check_determinism(make_context())
        assert result.passed
        assert result.details["rows"] == 100


class TestRunChecks:
    def test_report_written(self, tmp_path):
        results = run_checks(["killing", "spaceform"], out_dir=tmp_path, seed=5)
        assert [r.name for r in results] == ["killing", "spaceform"]
        report = json.loads((tmp_path / "check_report.json").read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert report["variant"] == "corrected"
        assert [s["suite"] for s in report["suites"]] == ["killing", "spaceform"]
        assert not (tmp_path / "discrepancies.json").exists()

    def test_quadrature_report_is_valid_json(self, tmp_path):
        with patch.object(checks.settings, "check_geodesics_per_family", 30):
            results = run_checks(["quadrature"], out_dir=tmp_path)
        report = json.loads((tmp_path / "check_report.json").read_text(encoding="utf-8"))
        assert report["passed"] is results[0].passed is True
        assert report["suites"][0]["details"]["imaginary_detection_mismatches"] == 0

    def test_unknown_suite(self):
        with pytest.raises(ValueError, match="unknown"):
            run_checks(["nope"])

    def test_geometry_error_fails_the_suite(self):
        def broken(ctx):
            raise DegenerateFrame("boom")

        with patch.dict(checks.SUITES, {"killing": broken}):
            results = run_checks(["killing"])
        assert not results[0].passed
        assert "DegenerateFrame" in results[0].details["error"]

    def test_outcomes_recorded(self):
        with patch.dict(checks.SUITES, {"killing": lambda ctx: SuiteResult("killing", False)}), \
                patch.object(checks.metrics, "record_check_suite") as record:
            run_checks(["killing"])
        record.assert_called_once_with("killing", False)

    def test_seed_makes_reports_reproducible(self, tmp_path):
        run_checks(["isometry"], out_dir=tmp_path / "a", seed=9)
        run_checks(["isometry"], out_dir=tmp_path / "b", seed=9)
        assert (tmp_path / "a" / "check_report.json").read_bytes() == (tmp_path / "b" / "check_report.json").read_bytes()
