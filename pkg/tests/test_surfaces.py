"""Tests for the rotational surfaces, their frames and curvature."""

import math
import warnings

import numpy as np
import pytest

from rotational_geodesics.exceptions import DegenerateFrame, NormalizationWarning, PatternMismatch
from rotational_geodesics.linalg import inner
from rotational_geodesics.models import FormulaVariant, ProductReading, ProfilePattern, SurfaceFamily
from rotational_geodesics.profiles import ProfileKind, build_profile, polynomial_path
from rotational_geodesics.surfaces import (
    curvature_closed,
    curvature_deviation,
    curvature_exact,
    curvature_numeric,
    curvature_orbit_numeric,
    curvature_terms,
    exact_jets,
    frame_radicands,
    immerse_curve_restricted,
    immerse_full,
    induced_metric3,
    normal_frame,
    numeric_jets,
    rotation_matrix,
    surface_sampler,
)
from tests.conftest import make_path, make_profile

# Generic, nondegenerate setups per family: (first, second, path rates, t, s)
GENERIC = {
    SurfaceFamily.S14: ((2.0, 0.0, 1.0), (3.0, 0.5, 1.0), (1.0, 0.5), 0.4, 0.6),
    SurfaceFamily.S23: ((2.0, 0.0, 1.0), (3.0, 0.5, 1.0), (1.0, 0.5), 0.4, 0.6),
    SurfaceFamily.S56: ((2.0, 0.0, 1.0), (3.0, 0.5, 1.0), (1.0, 0.5), 0.4, 0.6),
}


def generic(fam):
    first, second, (ra, rb), t, s = GENERIC[fam]
    return make_profile(fam, first=first, second=second), make_path(ra, rb), t, s


class TestImmersion:
    def test_zero_angles_give_the_profile(self):
        profile = make_profile(SurfaceFamily.S14)
        np.testing.assert_allclose(immerse_full(SurfaceFamily.S14, profile, 0.0, 0.0, 0.7), profile.point(0.7))

    def test_s14_componentwise(self):
        profile = make_profile(SurfaceFamily.S14)
        x = immerse_full(SurfaceFamily.S14, profile, 0.3, 0.5, 1.0)
        f1, f4 = 3.0, 4.0
        np.testing.assert_allclose(
            x, [f1 * math.cosh(0.3), f4 * math.sinh(0.5), f1 * math.sinh(0.3), f4 * math.cosh(0.5)]
        )

    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    @pytest.mark.parametrize("pattern", list(ProfilePattern))
    def test_matches_rotation_of_profile(self, fam, pattern):
        profile = make_profile(fam, pattern=pattern)
        x = immerse_full(fam, profile, 0.4, -0.7, 0.9)
        np.testing.assert_allclose(x, rotation_matrix(fam, 0.4, -0.7) @ profile.point(0.9), atol=1e-13)

    def test_curve_restricted(self):
        profile = make_profile(SurfaceFamily.S14)
        x = immerse_curve_restricted(SurfaceFamily.S14, profile, make_path(1.0, 0.0), 0.5, 1.0)
        np.testing.assert_allclose(x, [3.0 * math.cosh(0.5), 0.0, 3.0 * math.sinh(0.5), 4.0])

    def test_family_mismatch(self):
        with pytest.raises(PatternMismatch):
            immerse_full(SurfaceFamily.S14, make_profile(SurfaceFamily.S23), 0.0, 0.0, 0.0)


class TestJets:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_exact_and_numeric_agree(self, fam):
        profile, path, t, s = generic(fam)
        for exact, numeric in zip(exact_jets(fam, profile, path, t, s), numeric_jets(fam, profile, path, t, s)):
            np.testing.assert_allclose(exact, numeric, atol=1e-4 * max(1.0, float(np.max(np.abs(exact)))))


class TestNormalFrame:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_corrected_frame_is_orthonormal_and_normal(self, fam):
        profile, path, t, s = generic(fam)
        e3, e4 = normal_frame(fam, profile, path, t, s)
        x_t, x_s = exact_jets(fam, profile, path, t, s)[:2]
        assert abs(inner(e3, e3)) == pytest.approx(1.0)
        assert abs(inner(e4, e4)) == pytest.approx(1.0)
        assert inner(e3, e4) == pytest.approx(0.0, abs=1e-12)
        for e in (e3, e4):
            assert inner(e, x_t) == pytest.approx(0.0, abs=1e-10)
            assert inner(e, x_s) == pytest.approx(0.0, abs=1e-10)

    def test_printed_s23_frame_is_not_normal(self):
        profile, path, t, s = generic(SurfaceFamily.S23)
        e3, _ = normal_frame(SurfaceFamily.S23, profile, path, t, s, FormulaVariant.VERBATIM)
        x_t = exact_jets(SurfaceFamily.S23, profile, path, t, s)[0]
        assert abs(inner(e3, x_t)) > 1e-3

    def test_null_tangent_direction(self):
        profile = make_profile(SurfaceFamily.S14, first=(2.0, 0.0, 1.0), second=(2.0, 0.0, 1.0))
        with pytest.raises(DegenerateFrame, match="null"):
            normal_frame(SurfaceFamily.S14, profile, make_path(1.0, 1.0), 0.3, 0.5)

    def test_alternate_pattern_rejected(self):
        profile = make_profile(SurfaceFamily.S56, pattern=ProfilePattern.ALTERNATE)
        with pytest.raises(PatternMismatch):
            normal_frame(SurfaceFamily.S56, profile, make_path(), 0.3, 0.5)

    def test_s23_radicands(self):
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR)
        r3, r4 = frame_radicands(SurfaceFamily.S23, profile, make_path(1.0, 1.0), 0.3, 0.7)
        assert r3 == pytest.approx(1.0)
        assert r4 == pytest.approx(1.0)


class TestCurvature:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_corrected_closed_form_matches_oracle(self, fam):
        profile, path, t, s = generic(fam)
        closed = curvature_closed(fam, profile, path, t, s)
        numeric = curvature_numeric(fam, profile, path, t, s)
        assert curvature_deviation(closed, numeric) < 1e-4
        assert closed.H_e3 == pytest.approx(numeric.H_e3, rel=1e-4, abs=1e-4)
        assert closed.H_e4 == pytest.approx(numeric.H_e4, rel=1e-4, abs=1e-4)

    def test_circular_s23_sample(self):
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR)
        path = make_path(1.0, 1.0)
        closed = curvature_closed(SurfaceFamily.S23, profile, path, 0.3, 0.7)
        numeric = curvature_numeric(SurfaceFamily.S23, profile, path, 0.3, 0.7)
        assert curvature_deviation(closed, numeric) < 1e-4

    def test_variant_is_recorded(self):
        profile, path, t, s = generic(SurfaceFamily.S56)
        sample = curvature_closed(SurfaceFamily.S56, profile, path, t, s, FormulaVariant.VERBATIM)
        assert sample.variant == FormulaVariant.VERBATIM
        assert sample.to_dict()["variant"] == "verbatim"
        assert math.isfinite(sample.K)

    def test_alternate_pattern_numeric_only(self):
        profile = make_profile(SurfaceFamily.S23, pattern=ProfilePattern.ALTERNATE, second=(3.0, 0.5, 1.0))
        path = make_path(1.0, 0.5)
        with pytest.raises(PatternMismatch):
            curvature_closed(SurfaceFamily.S23, profile, path, 0.4, 0.6)
        sample = curvature_numeric(SurfaceFamily.S23, profile, path, 0.4, 0.6)
        assert math.isfinite(sample.K)
        assert sample.variant is None

    def test_product_of_circles_is_flat(self):
        profile = build_profile(SurfaceFamily.S56, ProfileKind.CONSTANT, first=[1.5], second=[0.8])
        for a, b in [(0.0, 0.0), (0.3, 0.3), (1.2, -0.4)]:
            sample = curvature_orbit_numeric(SurfaceFamily.S56, profile, 0.2, a, b)
            assert abs(sample.K) < 5e-6

    def test_deviation_is_relative_above_one(self):
        profile, path, t, s = generic(SurfaceFamily.S14)
        a = curvature_numeric(SurfaceFamily.S14, profile, path, t, s)
        b = curvature_numeric(SurfaceFamily.S14, profile, path, t, s)
        b.K = a.K + 0.5 * max(abs(a.K), 1.0)
        assert curvature_deviation(b, a) == pytest.approx(0.5)

    def test_sampler_binds_surface(self):
        profile, path, t, s = generic(SurfaceFamily.S23)
        point, sample = surface_sampler(SurfaceFamily.S23, profile, path, FormulaVariant.CORRECTED)(t, s)
        np.testing.assert_allclose(point, immerse_curve_restricted(SurfaceFamily.S23, profile, path, t, s))
        assert sample.K == pytest.approx(curvature_closed(SurfaceFamily.S23, profile, path, t, s).K)


class TestClosedForms:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_corrected_matches_exact_jets(self, fam):
        first, second, _, t, s = GENERIC[fam]
        profile = make_profile(fam, first=first, second=second)
        path = polynomial_path([0.1, 1.0, 0.3], [-0.2, 0.5, -0.4])
        closed = curvature_closed(fam, profile, path, t, s)
        exact = curvature_exact(fam, profile, path, t, s)
        assert closed.K == pytest.approx(exact.K, rel=1e-9, abs=1e-12)
        assert closed.H_e3 == pytest.approx(exact.H_e3, rel=1e-9, abs=1e-12)
        assert closed.H_e4 == pytest.approx(exact.H_e4, rel=1e-9, abs=1e-12)

    def test_circular_s23_by_hand(self):
        # p = cos s, q = sin s on a unit-rate path: twist = bend = -1, turn = 1, r3 = r4 = 1
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR)
        path = make_path(1.0, 1.0)
        closed = curvature_closed(SurfaceFamily.S23, profile, path, 0.3, 0.7)
        assert closed.K == pytest.approx(0.0, abs=1e-12)
        assert closed.H_e3 == pytest.approx(0.0, abs=1e-12)
        assert closed.H_e4 == pytest.approx(1.0)
        printed = curvature_closed(SurfaceFamily.S23, profile, path, 0.3, 0.7, FormulaVariant.VERBATIM)
        assert printed.H_e4 == pytest.approx(math.cos(1.4))

    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_linear_path_has_no_e3_mean_curvature(self, fam):
        profile, path, t, s = generic(fam)
        assert curvature_closed(fam, profile, path, t, s).H_e3 == 0.0

    def test_printed_s14_e3_mean_curvature_is_off(self):
        profile, _, t, s = generic(SurfaceFamily.S14)
        path = make_path(1.0, 0.7)
        printed = curvature_closed(SurfaceFamily.S14, profile, path, t, s, FormulaVariant.VERBATIM)
        assert curvature_closed(SurfaceFamily.S14, profile, path, t, s).H_e3 == 0.0
        assert abs(printed.H_e3) > 0.5

    def test_printed_s14_k_misses_the_determinant(self):
        profile, path, t, s = generic(SurfaceFamily.S14)
        r3, r4 = frame_radicands(SurfaceFamily.S14, profile, path, t, s)
        printed = curvature_closed(SurfaceFamily.S14, profile, path, t, s, FormulaVariant.VERBATIM)
        corrected = curvature_closed(SurfaceFamily.S14, profile, path, t, s)
        assert printed.K == pytest.approx(r3 * r4 * corrected.K)

    def test_s56_readings(self):
        profile, path, t, s = generic(SurfaceFamily.S56)
        r3, r4 = frame_radicands(SurfaceFamily.S56, profile, path, t, s)
        corrected = curvature_terms(SurfaceFamily.S56, profile, path, t, s)
        squared = curvature_terms(SurfaceFamily.S56, profile, path, t, s, FormulaVariant.VERBATIM)
        unsquared = curvature_terms(
            SurfaceFamily.S56, profile, path, t, s, FormulaVariant.VERBATIM, ProductReading.UNSQUARED,
        )
        assert squared["K_meridian"] == unsquared["K_meridian"]
        assert unsquared["K_profile"] == pytest.approx(r3 * r4 * corrected["K_profile"])
        assert squared["K_profile"] != pytest.approx(unsquared["K_profile"])
        sample = curvature_closed(
            SurfaceFamily.S56, profile, path, t, s, FormulaVariant.VERBATIM, ProductReading.UNSQUARED,
        )
        assert sample.K == pytest.approx(unsquared["K_meridian"] + unsquared["K_profile"])

    def test_reading_ignored_outside_s56(self):
        profile, path, t, s = generic(SurfaceFamily.S14)
        a = curvature_terms(SurfaceFamily.S14, profile, path, t, s, FormulaVariant.VERBATIM, ProductReading.SQUARED)
        b = curvature_terms(SurfaceFamily.S14, profile, path, t, s, FormulaVariant.VERBATIM, ProductReading.UNSQUARED)
        assert a == b

    def test_terms_need_primary_pattern(self):
        profile = make_profile(SurfaceFamily.S23, pattern=ProfilePattern.ALTERNATE, second=(3.0, 0.5, 1.0))
        with pytest.raises(PatternMismatch):
            curvature_terms(SurfaceFamily.S23, profile, make_path(1.0, 0.5), 0.4, 0.6)


class TestInducedMetric:
    def test_hyperbolic_upsilon1_is_exactly_normalized(self):
        profile = build_profile(SurfaceFamily.S14, ProfileKind.HYPERBOLIC)
        with warnings.catch_warnings():
            warnings.simplefilter("error", NormalizationWarning)
            metric = induced_metric3(SurfaceFamily.S14, profile, 1.0, arclength_normalized=True)
        np.testing.assert_allclose(
            metric.matrix(1.0), np.diag([math.sinh(1.0) ** 2, -math.cosh(1.0) ** 2, -1.0]), atol=1e-12
        )

    def test_circular_upsilon2(self):
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR)
        metric = induced_metric3(SurfaceFamily.S23, profile, 0.4)
        np.testing.assert_allclose(metric.matrix(0.4), np.diag([math.cos(0.4) ** 2, math.sin(0.4) ** 2, -1.0]))

    def test_normalization_that_changes_geometry_warns(self):
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR, scale=2.0)
        with pytest.warns(NormalizationWarning):
            induced_metric3(SurfaceFamily.S23, profile, 0.4, arclength_normalized=True)

    def test_raw_metric_keeps_actual_t_coefficient(self):
        profile = build_profile(SurfaceFamily.S23, ProfileKind.CIRCULAR, scale=2.0)
        metric = induced_metric3(SurfaceFamily.S23, profile, 0.4)
        assert metric.at(0.4).C == pytest.approx(2.0)
        assert metric.at(0.4).eps_t == -1
