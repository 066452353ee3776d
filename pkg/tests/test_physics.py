"""Tests for specific energy, angular momentum and the effective-energy relation."""

import math

import numpy as np
import pytest

from rotational_geodesics.clairaut import clairaut_decompose, unit_speed_state
from rotational_geodesics.exceptions import PatternMismatch
from rotational_geodesics.geodesics import conserved_momenta
from rotational_geodesics.integrator import IntegratorOptions, integrate
from rotational_geodesics.models import FormulaVariant, SurfaceFamily, Trajectory
from rotational_geodesics.physics import (
    effective_energy_residual,
    energy_report,
    specific_angular_momentum,
    specific_angular_momentum_many,
    specific_energy,
)
from tests.conftest import make_metric, make_state


class TestSpecificQuantities:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    def test_energy_agrees_with_momenta(self, fam):
        metric = make_metric(fam)
        state = make_state(va=0.3, vb=-0.2, vt=0.9)
        assert specific_energy(fam, state, metric) == pytest.approx(conserved_momenta(metric, state)[0])

    def test_angular_momentum_normalized(self):
        assert specific_angular_momentum(make_state(vt=0.75), make_metric()) == -1.5
        assert specific_angular_momentum(make_state(vt=0.75)) == -1.5

    def test_angular_momentum_uses_actual_c(self):
        metric = make_metric(SurfaceFamily.S23, arclength_normalized=False)
        l = specific_angular_momentum(make_state(t=0.5, vt=1.0), metric)
        assert l == pytest.approx(-2.0 * math.sqrt(2.0))

    def test_energy_rejects_metric_of_another_family(self):
        with pytest.raises(PatternMismatch, match="S23"):
            specific_energy(SurfaceFamily.S14, make_state(), make_metric(SurfaceFamily.S23))

    def test_angular_momentum_many(self):
        metric = make_metric(SurfaceFamily.S23, arclength_normalized=False)
        states = [make_state(vt=0.75), make_state(t=1.1, vt=-0.2)]
        many = specific_angular_momentum_many(metric, np.array([st.as_array() for st in states]))
        assert many.tolist() == pytest.approx([specific_angular_momentum(st, metric) for st in states])


class TestEffectiveEnergy:
    @pytest.mark.parametrize("fam", list(SurfaceFamily))
    @pytest.mark.parametrize("scale", [1.0, 0.3])
    def test_corrected_relation_is_an_identity(self, fam, scale):
        metric = make_metric(fam)
        unit = unit_speed_state(fam, metric, 0.0, 0.0, 0.6, 0.5, 0.2)
        state = make_state(t=0.6, va=scale * unit.va, vb=scale * unit.vb, vt=scale * unit.vt)
        dec = clairaut_decompose(fam, metric, state)
        energy = specific_energy(fam, state, metric)
        l = specific_angular_momentum(state, metric)
        assert effective_energy_residual(fam, energy, dec.speed, dec.phi, dec.theta, l) == pytest.approx(0.0, abs=1e-12)

    def test_printed_upsilon2_relation_misses(self):
        metric = make_metric(SurfaceFamily.S23)
        state = unit_speed_state(SurfaceFamily.S23, metric, 0.0, 0.0, 0.6, 0.5, 0.2)
        dec = clairaut_decompose(SurfaceFamily.S23, metric, state)
        residual = effective_energy_residual(
            SurfaceFamily.S23, -0.5, dec.speed, dec.phi, dec.theta,
            specific_angular_momentum(state, metric), FormulaVariant.VERBATIM,
        )
        assert abs(residual) > 1e-3


class TestEnergyReport:
    def setup_method(self):
        self.metric = make_metric(SurfaceFamily.S23)
        state = unit_speed_state(SurfaceFamily.S23, self.metric, 0.0, 0.0, 0.5, 0.4, 0.3)
        self.trajectory = integrate(self.metric, state, 0.5, IntegratorOptions(step=1e-2))

    def test_corrected_relation_holds(self):
        report = energy_report(SurfaceFamily.S23, self.metric, self.trajectory)
        assert report.relation_holds
        assert report.residual_max_drift < 1e-7
        assert report.energy == pytest.approx(-0.5)
        assert report.l_specific == pytest.approx(-2.0 * self.trajectory.states[0].vt)
        assert report.arc_length == pytest.approx(0.5, rel=1e-6)
        assert report.action == pytest.approx(-0.25, rel=1e-6)

    def test_printed_relation_does_not_hold(self):
        report = energy_report(SurfaceFamily.S23, self.metric, self.trajectory, FormulaVariant.VERBATIM)
        assert not report.relation_holds
        assert report.to_dict()["variant"] == "verbatim"

    def test_empty_trajectory(self):
        with pytest.raises(ValueError):
            energy_report(SurfaceFamily.S23, self.metric, Trajectory(family=SurfaceFamily.S23))
