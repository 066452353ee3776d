"""Geodesic mechanics on the diagonal 3-metrics.

The coordinates are (a, b, t): the family's two rotation angles and the
profile parameter.  The metric depends on t only, so a and b are cyclic
and their conjugate momenta p_a = eps_a A^2 va, p_b = eps_b B^2 vb are
conserved together with the energy E = g(v, v) / 2.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .metric3 import CoefficientArrays, DiagonalMetric3, MetricCoefficients
from .models import GeodesicState, Trajectory

StateLike = Union[GeodesicState, np.ndarray]

# Step of the discrete Euler-Lagrange check.
EL_STEP = 1e-5


@dataclass(frozen=True)
class Christoffel3:
    """Nonzero Levi-Civita symbols of diag(eps_a A^2, eps_b B^2, eps_t C^2)."""
    a_at: float  # Gamma^a_{at} = A'/A
    b_bt: float  # Gamma^b_{bt} = B'/B
    t_aa: float  # Gamma^t_{aa} = -eps_a eps_t A A'/C^2
    t_bb: float  # Gamma^t_{bb} = -eps_b eps_t B B'/C^2
    t_tt: float  # Gamma^t_{tt} = C'/C

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.a_at, self.b_bt, self.t_aa, self.t_bb, self.t_tt)


def _symbols(c: MetricCoefficients) -> Christoffel3:
    c2 = c.C * c.C
    return Christoffel3(
        a_at=c.dA / c.A,
        b_bt=c.dB / c.B,
        t_aa=-c.eps_a * c.eps_t * c.A * c.dA / c2,
        t_bb=-c.eps_b * c.eps_t * c.B * c.dB / c2,
        t_tt=c.dC / c.C,
    )


def christoffel(m: DiagonalMetric3, t: float) -> Christoffel3:
    """Christoffel symbols at t.

    Raises:
        DegenerateMetric: if a coefficient vanishes at t
    """
    return _symbols(m.at(t))


def _as_array(st: StateLike) -> np.ndarray:
    if isinstance(st, GeodesicState):
        return st.as_array()
    return np.asarray(st, dtype=float)


def geodesic_rhs(m: DiagonalMetric3, st: StateLike) -> np.ndarray:
    """d/ds of (a, b, t, va, vb, vt) along a geodesic.

    Raises:
        DegenerateMetric: if the metric is degenerate at st.t
    """
    _, _, t, va, vb, vt = _as_array(st)
    g = christoffel(m, t)
    return np.array([
        va,
        vb,
        vt,
        -2.0 * g.a_at * va * vt,
        -2.0 * g.b_bt * vb * vt,
        -g.t_tt * vt * vt - g.t_aa * va * va - g.t_bb * vb * vb,
    ])


def rhs_from_coefficients(c: CoefficientArrays, Y: np.ndarray) -> np.ndarray:
    """geodesic_rhs for rows whose coefficients were already evaluated at Y[:, 2]."""
    va, vb, vt = Y[:, 3], Y[:, 4], Y[:, 5]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c2 = c.C * c.C
        a_at = c.dA / c.A
        b_bt = c.dB / c.B
        t_aa = -c.eps_a * c.eps_t * c.A * c.dA / c2
        t_bb = -c.eps_b * c.eps_t * c.B * c.dB / c2
        t_tt = c.dC / c.C
        dY = np.column_stack([
            va,
            vb,
            vt,
            -2.0 * a_at * va * vt,
            -2.0 * b_bt * vb * vt,
            -t_tt * vt * vt - t_aa * va * va - t_bb * vb * vb,
        ])
    return dY


def geodesic_rhs_many(m: DiagonalMetric3, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """geodesic_rhs over the rows of an (N, 6) state array.

    Returns the (N, 6) derivatives and a mask of rows whose metric is
    degenerate (those rows' derivatives are meaningless).
    """
    c = m.at_many(Y[:, 2])
    return rhs_from_coefficients(c, Y), c.degenerate


def conserved_momenta_many(m: DiagonalMetric3, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(E, p_a, p_b) for every row of an (N, 6) state array."""
    c = m.at_many(Y[:, 2])
    va, vb, vt = Y[:, 3], Y[:, 4], Y[:, 5]
    p_a = c.g_aa * va
    p_b = c.g_bb * vb
    energy = 0.5 * (p_a * va + p_b * vb + c.g_tt * vt * vt)
    return energy, p_a, p_b


def conserved_momenta(m: DiagonalMetric3, st: StateLike) -> Tuple[float, float, float]:
    """(E, p_a, p_b) of a state."""
    _, _, t, va, vb, vt = _as_array(st)
    c = m.at(t)
    p_a = c.g_aa * va
    p_b = c.g_bb * vb
    energy = 0.5 * (p_a * va + p_b * vb + c.g_tt * vt * vt)
    return energy, p_a, p_b


def momentum_t(m: DiagonalMetric3, st: StateLike) -> float:
    """p_t = eps_t C^2 vt, the momentum conjugate to t (not conserved in general)."""
    _, _, t, _, _, vt = _as_array(st)
    return m.at(t).g_tt * vt


def lagrangian(m: DiagonalMetric3, st: StateLike) -> float:
    """Energy Lagrangian g(v, v) / 2; equal to E on every state."""
    return conserved_momenta(m, st)[0]


def speed_lagrangian(m: DiagonalMetric3, st: StateLike) -> float:
    """sqrt|g(v, v)|, whose integral is the (pseudo-)arc length."""
    return math.sqrt(abs(2.0 * lagrangian(m, st)))


def euler_lagrange_residual(m: DiagonalMetric3, st: StateLike, h: float = EL_STEP) -> float:
    """Relative mismatch between geodesic_rhs and the Euler-Lagrange equations.

    The Lagrangian's t-gradient and the t-derivatives of the metric are
    taken by central differences, so this is an independent check of the
    Christoffel symbols.
    """
    y = _as_array(st)
    _, _, t, va, vb, vt = y
    v = np.array([va, vb, vt])

    def diag_at(tt: float) -> np.ndarray:
        c = m.at(tt)
        return np.array([c.g_aa, c.g_bb, c.g_tt])

    g0 = diag_at(t)
    dg = (diag_at(t + h) - diag_at(t - h)) / (2 * h)
    # d/ds (g_kk v^k) = dL/dq^k, with dL/da = dL/db = 0 and dL/dt = dg . v^2 / 2
    force = np.array([0.0, 0.0, 0.5 * float(dg @ (v * v))])
    accel_el = (force - dg * vt * v) / g0
    accel = geodesic_rhs(m, y)[3:]
    return float(np.max(np.abs(accel_el - accel)) / max(1.0, float(np.max(np.abs(accel)))))


def _state_rows(trajectory: Trajectory) -> np.ndarray:
    return np.array([st.as_array() for st in trajectory.states])


def action_integral(m: DiagonalMetric3, trajectory: Trajectory) -> float:
    """Integral of the energy Lagrangian over the trajectory (trapezoid rule)."""
    if len(trajectory.states) < 2:
        return 0.0
    values = conserved_momenta_many(m, _state_rows(trajectory))[0]
    return float(np.trapezoid(values, trajectory.s_values))


def arc_length(m: DiagonalMetric3, trajectory: Trajectory) -> float:
    """Integral of sqrt|g(v, v)| over the trajectory (trapezoid rule)."""
    if len(trajectory.states) < 2:
        return 0.0
    values = np.sqrt(np.abs(2.0 * conserved_momenta_many(m, _state_rows(trajectory))[0]))
    return float(np.trapezoid(values, trajectory.s_values))
