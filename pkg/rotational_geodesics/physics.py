"""Particle picture of the geodesics: specific energy and angular momentum.

Identifying the affine parameter with time, a geodesic is the orbit of a
free particle with specific energy E = g(v, v) / 2.  The
specific angular momentum is l = -2 u_t (u_t = C vt, so l = -2 vt under
the normalization C = 1), which makes the effective-energy relation of
each family an identity between E, V, the chart angles and l.
"""

import logging
import math
from typing import Optional

import numpy as np

from .clairaut import decompose_many
from .exceptions import PatternMismatch
from .geodesics import StateLike, _as_array, action_integral, arc_length, conserved_momenta_many
from .metric3 import DiagonalMetric3
from .models import EnergyReport, FormulaVariant, SurfaceFamily, Trajectory

logger = logging.getLogger(__name__)


def specific_energy(fam: SurfaceFamily, st: StateLike, m: DiagonalMetric3) -> float:
    """Half the family's quadratic form on the velocity, via the metric matrix.

    Raises:
        PatternMismatch: if the metric belongs to another family
    """
    fam = SurfaceFamily(fam)
    if m.family is not None and m.family != fam:
        raise PatternMismatch(f"metric belongs to {m.family.value}, not {fam.value}")
    y = _as_array(st)
    v = y[3:]
    return 0.5 * float(v @ m.matrix(y[2]) @ v)


def specific_angular_momentum(st: StateLike, m: Optional[DiagonalMetric3] = None) -> float:
    """Angular momentum l = -2 u_t; without a metric C = 1 is assumed."""
    y = _as_array(st)
    c = m.at(y[2]).C if m is not None else 1.0
    return -2.0 * c * y[5]


def specific_angular_momentum_many(m: DiagonalMetric3, Y: np.ndarray) -> np.ndarray:
    """l for every row of an (N, 6) state array."""
    return -2.0 * m.at_many(Y[:, 2]).C * Y[:, 5]


def effective_energy_residual(
    fam: SurfaceFamily,
    energy: float,
    speed: float,
    phi: float,
    theta: float,
    l: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> float:
    """E minus the right-hand side of the family's effective-energy relation.

    The verbatim variant keeps the printed sign and parenthesization; the
    corrected one is the relation the chart and metric actually imply.
    The numeric arguments may be arrays of equal shape.
    """
    fam, variant = SurfaceFamily(fam), FormulaVariant(variant)
    v2 = speed * speed
    l2 = l * l / 8.0
    if fam == SurfaceFamily.S14:
        if variant == FormulaVariant.VERBATIM:
            rhs = v2 / 2 * (np.cos(phi) ** 2 - np.cosh(theta) ** 2 * np.sin(phi) ** 2) - l2
        else:
            rhs = v2 / 2 * (np.sinh(phi) ** 2 - np.cosh(phi) ** 2 * np.cos(theta) ** 2) - l2
    elif fam == SurfaceFamily.S23:
        if variant == FormulaVariant.VERBATIM:
            rhs = v2 / 2 * (np.sinh(phi) ** 2 - l2)
        else:
            rhs = v2 / 2 * np.sinh(phi) ** 2 - l2
    else:
        rhs = -v2 * np.sin(phi) ** 2 / 2 - l2
    return energy - rhs


def energy_report(
    fam: SurfaceFamily,
    m: DiagonalMetric3,
    trajectory: Trajectory,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> EnergyReport:
    """Energy, l and the effective-energy residual along a trajectory.

    Samples where the chart cannot represent the velocity are left out of
    the residual statistics.
    """
    fam, variant = SurfaceFamily(fam), FormulaVariant(variant)
    if not trajectory.states:
        raise ValueError("empty trajectory")

    Y = np.array([st.as_array() for st in trajectory.states])
    dec = decompose_many(fam, m, Y, variant)
    hit = ~np.isnan(dec.phi)
    energy = conserved_momenta_many(m, Y[hit])[0]
    l = specific_angular_momentum_many(m, Y[hit])
    values = effective_energy_residual(fam, energy, dec.speed[hit], dec.phi[hit], dec.theta[hit], l, variant)

    if values.size:
        residual_mean = float(values.mean())
        residual_drift = float(np.max(np.abs(values - values[0])))
    else:
        logger.warning(f"{fam.submanifold} {variant.value} chart missed every sample; no residual")
        residual_mean = residual_drift = math.nan

    first = trajectory.states[0]
    return EnergyReport(
        family=fam,
        variant=variant,
        energy=specific_energy(fam, first, m),
        l_specific=specific_angular_momentum(first, m),
        residual_mean=residual_mean,
        residual_max_drift=residual_drift,
        action=action_integral(m, trajectory),
        arc_length=arc_length(m, trajectory),
    )
