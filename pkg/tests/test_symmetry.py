"""Tests for rotation generators, flows and the flat Killing check."""

import numpy as np
import pytest

from rotational_geodesics.exceptions import InvalidCoefficients
from rotational_geodesics.linalg import inner
from rotational_geodesics.models import Generator, KillingCoefficients
from rotational_geodesics.symmetry import (
    COEFFICIENT_GENERATORS,
    flow_matrix,
    generator_matrix,
    is_killing,
    killing_vector_at,
    lie_derivative_flat,
    lie_derivative_of_jacobian,
)


class TestKillingVector:
    def test_eta_xi_generator(self):
        w = killing_vector_at(KillingCoefficients(a=1.0), (1, 2, 3, 4))
        np.testing.assert_allclose(w, [4.0, 0.0, 0.0, 1.0])

    def test_elliptic_xi_rho_generator(self):
        w = killing_vector_at(KillingCoefficients(f=1.0), (1, 2, 3, 4))
        np.testing.assert_allclose(w, [-2.0, 1.0, 0.0, 0.0])

    def test_zero_coefficients(self):
        np.testing.assert_array_equal(killing_vector_at(KillingCoefficients(), (1, 2, 3, 4)), np.zeros(4))

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidCoefficients):
            KillingCoefficients(c=-0.1)

    def test_non_finite_weight_rejected(self):
        with pytest.raises(InvalidCoefficients):
            KillingCoefficients(d=float("inf"))


class TestLieDerivative:
    def test_random_fields_are_killing(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            k = KillingCoefficients(*(float(x) for x in rng.uniform(0, 1, 6)))
            p = rng.uniform(-1, 1, 4)
            assert np.max(np.abs(lie_derivative_flat(k, p))) < 1e-14
            assert is_killing(k)

    def test_scaling_field_is_not_killing(self):
        jac = np.zeros((4, 4))
        jac[0, 0] = 1.0
        lie = lie_derivative_of_jacobian(jac)
        assert lie[0, 0] == -2.0

    def test_zero_field(self):
        np.testing.assert_array_equal(lie_derivative_flat(KillingCoefficients(), np.ones(4)), np.zeros((4, 4)))

    @pytest.mark.parametrize("p", [np.ones(3), np.ones((2, 4))])
    def test_point_must_have_four_coordinates(self, p):
        with pytest.raises(ValueError, match="4 coordinates"):
            lie_derivative_flat(KillingCoefficients(a=1.0), p)


class TestFlowMatrix:
    @pytest.mark.parametrize("g", list(Generator))
    def test_identity_at_zero(self, g):
        np.testing.assert_allclose(flow_matrix(g, 0.0), np.eye(4))

    @pytest.mark.parametrize("g", list(Generator))
    def test_group_law(self, g):
        np.testing.assert_allclose(flow_matrix(g, 0.3) @ flow_matrix(g, 0.5), flow_matrix(g, 0.8), atol=1e-14)

    @pytest.mark.parametrize("g", list(Generator))
    def test_derivative_at_zero_is_generator(self, g):
        h = 1e-6
        numeric = (flow_matrix(g, h) - flow_matrix(g, -h)) / (2 * h)
        np.testing.assert_allclose(numeric, generator_matrix(g), atol=1e-8)

    @pytest.mark.parametrize("name, g", list(COEFFICIENT_GENERATORS.items()))
    def test_flow_velocity_is_oriented_killing_term(self, name, g):
        p = np.array([1.0, 2.0, 3.0, 4.0])
        h = 1e-6
        velocity = (flow_matrix(g, h) - flow_matrix(g, -h)) @ p / (2 * h)
        w = killing_vector_at(KillingCoefficients(**{name: 1.0}), p)
        np.testing.assert_allclose(velocity, g.orientation * w, atol=1e-8)

    def test_elliptic_flows_turn_against_their_killing_terms(self):
        assert Generator.OMEGA5.orientation == Generator.OMEGA6.orientation == -1
        p = np.array([1.0, 2.0, 3.0, 4.0])
        for g in (Generator.OMEGA5, Generator.OMEGA6):
            name = next(n for n, gen in COEFFICIENT_GENERATORS.items() if gen == g)
            w = killing_vector_at(KillingCoefficients(**{name: 1.0}), p)
            np.testing.assert_allclose(generator_matrix(g) @ p, -w)

    def test_boost_preserves_inner(self):
        m = flow_matrix(Generator.OMEGA2, 0.7)
        rng = np.random.default_rng(5)
        for v, w in rng.uniform(-1, 1, (100, 2, 4)):
            assert abs(inner(m @ v, m @ w) - inner(v, w)) < 1e-12

    def test_elliptic_block_sign_pattern(self):
        m = flow_matrix(Generator.OMEGA5, np.pi / 2)
        np.testing.assert_allclose(m[:2, :2], [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)

    def test_hyperbolic_generators_mix_their_slots(self):
        m = flow_matrix(Generator.OMEGA1, 1.0)
        assert m[0, 2] == pytest.approx(np.sinh(1.0))
        assert m[2, 0] == pytest.approx(np.sinh(1.0))
        assert m[1, 1] == 1.0
