"""Clairaut-type constants, angle charts and quadrature slopes.

Write a geodesic's velocity in orthonormal components u = (A va, B vb, C vt)
and its speed V = sqrt(2|E|).  Each family has a two-angle chart (phi,
theta) for u at fixed V, and the two Clairaut products are 2 f u / V for
the family's signed radii, which makes them constant whenever the Killing
momenta are.

Charts come in two variants.  ``VERBATIM`` is the chart as printed; for
Upsilon1 it does not respect the signature of the metric, so the chart
residual reports by how much a state misses it.  ``CORRECTED`` is the
signature-consistent chart.  The Upsilon2 and Upsilon3 charts are the same
in both variants.
"""

import math
from typing import NamedTuple, Tuple

import numpy as np

from .exceptions import DecompositionOutOfRange, ImaginarySlope, PatternMismatch
from .geodesics import StateLike, _as_array, conserved_momenta
from .metric3 import DiagonalMetric3, MetricCoefficients
from .models import FormulaVariant, GeodesicState, ProfilePattern, SurfaceFamily

# Chart residuals (relative to V) above this count as out of range.
CHART_TOLERANCE = 1e-8
_NULL_SPEED = 1e-12


class ClairautDecomposition(NamedTuple):
    speed: float
    phi: float
    theta: float
    clairaut1: float
    clairaut2: float
    chart_in_range: bool = True
    chart_residual: float = 0.0

    @property
    def products(self) -> Tuple[float, float]:
        return self.clairaut1, self.clairaut2


class ClairautArrays(NamedTuple):
    """Row-wise decomposition of an (N, 6) state array."""
    speed: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    clairaut1: np.ndarray
    clairaut2: np.ndarray
    chart_in_range: np.ndarray
    chart_residual: np.ndarray


def _check_metric(fam: SurfaceFamily, m: DiagonalMetric3) -> SurfaceFamily:
    fam = SurfaceFamily(fam)
    if m.family is not None and m.family != fam:
        raise PatternMismatch(f"metric belongs to {m.family.value}, not {fam.value}")
    if m.pattern != ProfilePattern.PRIMARY:
        raise PatternMismatch(f"angle charts of {fam.value} are stated for the primary pattern only")
    return fam


def orthonormal_components(c: MetricCoefficients, st: StateLike) -> np.ndarray:
    """(A va, B vb, C vt)."""
    _, _, _, va, vb, vt = _as_array(st)
    return np.array([c.A * va, c.B * vb, c.C * vt])


def chart(fam: SurfaceFamily, variant: FormulaVariant, speed, phi, theta) -> np.ndarray:
    """Orthonormal components (u_a, u_b, u_t) the family's chart assigns to (V, phi, theta).

    Broadcasts over array arguments; the components are on the last axis.
    """
    fam, variant = SurfaceFamily(fam), FormulaVariant(variant)
    if fam == SurfaceFamily.S14:
        if variant == FormulaVariant.VERBATIM:
            u = (np.cos(phi), np.cosh(theta) * np.sin(phi), np.sinh(theta) * np.sin(phi))
        else:
            u = (np.sinh(phi), np.cosh(phi) * np.cos(theta), np.cosh(phi) * np.sin(theta))
    elif fam == SurfaceFamily.S23:
        u = (np.cos(theta) * np.sinh(phi), np.sinh(phi) * np.sin(theta), np.cosh(phi))
    else:
        u = (np.sin(phi) * np.cosh(theta), np.sinh(theta) * np.sin(phi), np.cos(phi))
    return np.asarray(speed, dtype=float)[..., None] * np.stack(np.broadcast_arrays(*u), axis=-1)


def solve_chart(fam: SurfaceFamily, variant: FormulaVariant, u: np.ndarray, speed) -> Tuple[np.ndarray, np.ndarray]:
    """Invert the chart elementwise; NaN angles where the chart cannot represent u."""
    fam, variant = SurfaceFamily(fam), FormulaVariant(variant)
    w = np.asarray(u, dtype=float) / np.asarray(speed, dtype=float)[..., None]
    u_a, u_b, u_t = w[..., 0], w[..., 1], w[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam == SurfaceFamily.S14 and variant == FormulaVariant.VERBATIM:
            phi = np.arccos(u_a)
            phi = np.where(u_b != 0.0, np.copysign(phi, u_b), phi)
            flat = (np.sin(phi) == 0.0) | (u_b == 0.0)
            ratio = np.where(flat, 0.0, u_t / np.where(u_b == 0.0, 1.0, u_b))
            theta = np.arctanh(ratio)
            bad = (np.abs(u_a) > 1.0) | (~flat & (np.abs(ratio) >= 1.0))
        elif fam == SurfaceFamily.S14:
            phi, theta = np.arcsinh(u_a), np.arctan2(u_t, u_b)
            bad = np.zeros(phi.shape, dtype=bool)
        elif fam == SurfaceFamily.S23:
            phi, theta = np.arcsinh(np.hypot(u_a, u_b)), np.arctan2(u_b, u_a)
            bad = u_t < 1.0 - CHART_TOLERANCE
        else:
            on_axis = u_a == 0.0
            polar = np.arccos(np.clip(u_t, -1.0, 1.0))
            phi = np.where(on_axis, polar, np.copysign(polar, u_a))
            theta = np.where(on_axis, 0.0, np.arctanh(u_b / np.where(on_axis, 1.0, u_a)))
            bad = (
                (np.abs(u_t) > 1.0 + CHART_TOLERANCE)
                | (on_axis & (u_b != 0.0))
                | (~on_axis & (np.abs(u_b) >= np.abs(u_a)))
            )
    return np.where(bad, np.nan, phi), np.where(bad, np.nan, theta)


def decompose_many(
    fam: SurfaceFamily,
    m: DiagonalMetric3,
    Y: np.ndarray,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> ClairautArrays:
    """Speed, chart angles and Clairaut products of every row of an (N, 6) state array.

    Never raises for a row: null velocities get NaN products, angles and
    residual; chart misses get an infinite residual and NaN angles.

    Raises:
        PatternMismatch: for an alternate-pattern metric
    """
    fam = _check_metric(fam, m)
    variant = FormulaVariant(variant)
    c = m.at_many(Y[:, 2])
    u = np.column_stack([c.A * Y[:, 3], c.B * Y[:, 4], c.C * Y[:, 5]])
    energy = 0.5 * (c.g_aa * Y[:, 3] ** 2 + c.g_bb * Y[:, 4] ** 2 + c.g_tt * Y[:, 5] ** 2)
    speed = np.sqrt(2.0 * np.abs(energy))
    null = ~(speed > _NULL_SPEED)
    safe_speed = np.where(null, 1.0, speed)

    sign = -1.0 if fam == SurfaceFamily.S14 else 1.0
    clairaut1 = np.where(null, np.nan, 2.0 * c.f_a * u[:, 0] / safe_speed)
    clairaut2 = np.where(null, np.nan, sign * 2.0 * c.f_b * u[:, 1] / safe_speed)

    phi, theta = solve_chart(fam, variant, u, safe_speed)
    missed = np.isnan(phi)
    with np.errstate(invalid="ignore"):
        residual = np.linalg.norm(u - chart(fam, variant, safe_speed, phi, theta), axis=-1) / safe_speed
    residual = np.where(missed, np.inf, residual)
    residual = np.where(null, np.nan, residual)
    in_range = residual <= CHART_TOLERANCE
    phi = np.where(null, np.nan, phi)
    theta = np.where(null, np.nan, theta)
    return ClairautArrays(speed, phi, theta, clairaut1, clairaut2, in_range, residual)


def clairaut_decompose(
    fam: SurfaceFamily,
    m: DiagonalMetric3,
    st: StateLike,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    strict: bool = True,
) -> ClairautDecomposition:
    """Speed, chart angles and Clairaut products of a state.

    Args:
        fam: Surface family
        m: Induced metric of the family (primary pattern)
        st: Geodesic state
        variant: Which chart to invert
        strict: Raise when the chart cannot represent the state; otherwise
            return NaN angles with chart_in_range=False

    Raises:
        DecompositionOutOfRange: (strict only) the chart misses the state;
            the products are attached to the exception
        PatternMismatch: for an alternate-pattern metric
    """
    fam = _check_metric(fam, m)
    variant = FormulaVariant(variant)
    y = _as_array(st)
    c = m.at(y[2])
    row = decompose_many(fam, m, y[None, :], variant)
    speed = float(row.speed[0])
    if not speed > _NULL_SPEED:
        raise DecompositionOutOfRange("null or zero velocity has no angle decomposition")

    products = (float(row.clairaut1[0]), float(row.clairaut2[0]))
    in_range = bool(row.chart_in_range[0])
    if not in_range and strict:
        u = orthonormal_components(c, y)
        raise DecompositionOutOfRange(
            f"{fam.submanifold} {variant.value} chart cannot represent u={u.tolist()} at V={speed:.6g}",
            products=products,
        )

    return ClairautDecomposition(
        speed=speed,
        phi=float(row.phi[0]),
        theta=float(row.theta[0]),
        clairaut1=products[0],
        clairaut2=products[1],
        chart_in_range=in_range,
        chart_residual=float(row.chart_residual[0]),
    )


def unit_speed_state(
    fam: SurfaceFamily,
    m: DiagonalMetric3,
    a: float,
    b: float,
    t: float,
    phi: float,
    theta: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> GeodesicState:
    """State at (a, b, t) whose velocity the chart gives by (phi, theta), scaled to |2E| = 1.

    Raises:
        DecompositionOutOfRange: if the chart velocity is null
    """
    fam = _check_metric(fam, m)
    c = m.at(t)
    u_a, u_b, u_t = chart(fam, variant, 1.0, phi, theta)
    va, vb, vt = u_a / c.A, u_b / c.B, u_t / c.C
    two_e = c.g_aa * va * va + c.g_bb * vb * vb + c.g_tt * vt * vt
    if not abs(two_e) > _NULL_SPEED:
        raise DecompositionOutOfRange(f"chart velocity at phi={phi}, theta={theta} is null")
    scale = 1.0 / math.sqrt(abs(two_e))
    return GeodesicState(a=a, b=b, t=t, va=va * scale, vb=vb * scale, vt=vt * scale)


def quadrature_constant(m: DiagonalMetric3, st: StateLike) -> float:
    """The quadrature constant L, read as 2E = g(v, v)."""
    return 2.0 * conserved_momenta(m, st)[0]


def _root(radicand: float, label: str) -> float:
    if radicand < 0:
        raise ImaginarySlope(f"{label}: radicand {radicand:.6g} < 0 (turning point or forbidden region)", radicand)
    return math.sqrt(radicand)


def _ratio(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        return math.copysign(math.inf, numerator) if numerator else 0.0
    return numerator / denominator


def quadrature_slope(
    fam: SurfaceFamily,
    phi: float,
    theta: float,
    L: float,
    f_first: float,
    f_second: float,
    angle: int = 1,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> float:
    """dt/d(angle) along a geodesic from its chart angles.

    Args:
        fam: Surface family
        phi, theta: Chart angles at the point
        L: Quadrature constant (2E)
        f_first, f_second: Signed radii of the first and second rotation
        angle: 1 for dt/d(first angle), 2 for dt/d(second angle)
        variant: Printed or signature-consistent expression

    Raises:
        ImaginarySlope: if the radicand is negative
    """
    fam, variant = SurfaceFamily(fam), FormulaVariant(variant)
    if angle not in (1, 2):
        raise ValueError(f"angle must be 1 or 2, got {angle}")
    sp, cp = math.sin(phi), math.cos(phi)
    shp, chp = math.sinh(phi), math.cosh(phi)
    st, ct = math.sin(theta), math.cos(theta)
    sht, cht = math.sinh(theta), math.cosh(theta)
    label = f"{fam.submanifold} dt/d{fam.angle_names[angle - 1]} ({variant.value})"

    if fam == SurfaceFamily.S14:
        try:
            return _upsilon1_slope(variant, angle, L, f_first, f_second, sp, cp, shp, chp, ct, sht, cht, label)
        except ZeroDivisionError:
            # the velocity has no component along the chosen angle
            return math.inf

    if fam == SurfaceFamily.S23:
        root = _root(shp * shp - L, label)
        if angle == 1:
            return _ratio(f_first * root, ct * shp)
        return _ratio(f_second * root, shp * st)

    if variant == FormulaVariant.VERBATIM:
        # printed with a factor i; the modulus is returned when it is real
        root = _root(L + sp * sp, label)
    else:
        root = _root(-L - sp * sp, label)
    if angle == 1:
        return _ratio(f_first * root, sp * cht)
    return _ratio(f_second * root, sht * sp)


def _upsilon1_slope(variant, angle, L, f_first, f_second, sp, cp, shp, chp, ct, sht, cht, label) -> float:
    if variant == FormulaVariant.VERBATIM:
        if angle == 1:
            r = 1.0 - cht * cht * (sp / cp) ** 2 - L / (cp * cp)
            return f_first * _root(r, label)
        # printed with f2, which is identically zero on the primary pattern
        r = (cp / sp) ** 2 * (sht / cht) ** 2 - L / (chp * chp * sp * sp)
        return 0.0 * _root(r, label)
    if angle == 1:
        r = 1.0 - (chp / shp) ** 2 * ct * ct - L / (shp * shp)
        return f_first * _root(r, label)
    r = (shp / chp) ** 2 / (ct * ct) - 1.0 - L / (chp * chp * ct * ct)
    return f_second * _root(r, label)
