"""Rotational surfaces of E_2^4 and their curvature.

Each family rotates a planar profile curve gamma(s) by two commuting
one-parameter groups.  Along an angle path (a(t), b(t)) this gives the
2-surface X(t, s) = F1(a(t)) F2(b(t)) gamma(s), whose Gaussian curvature
and mean-curvature components come three ways here:

* ``curvature_closed(variant=VERBATIM)``: the printed closed forms (both
  readings of the S56 K)
* ``curvature_closed(variant=CORRECTED)``: the same closed forms corrected
  term by term, on a frame that really is normal
* ``curvature_numeric``: central differences of X, the independent oracle

``curvature_exact`` feeds the exact jets of X through the fundamental forms
and pins the corrected closed form to rounding error.
"""

import logging
import math
import warnings
from typing import Callable, Dict, Tuple

import numpy as np

from .exceptions import DegenerateFrame, DegenerateMetric, NormalizationWarning, PatternMismatch
from .linalg import basis, cross3, inner
from .metric3 import DEGENERACY_TOLERANCE, DiagonalMetric3, metric_from_profile
from .models import CurvatureSample, FormulaVariant, ProductReading, ProfilePattern, SurfaceFamily
from .profiles import AnglePath, Jet, ProfileCurve
from .symmetry import flow_matrix, generator_matrix

logger = logging.getLogger(__name__)

# Central-difference steps of the oracle.
FD_STEP_FIRST = 1e-4
FD_STEP_SECOND = 1e-3

# Allowed |eps_t C^2 + 1| before the arclength normalization counts as a change of geometry.
NORMALIZATION_TOLERANCE = 1e-9

Vectors = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def _require_family(fam: SurfaceFamily, profile: ProfileCurve) -> SurfaceFamily:
    fam = SurfaceFamily(fam)
    if profile.family != fam:
        raise PatternMismatch(f"profile built for {profile.family.value}, not {fam.value}")
    return fam


def _require_primary(profile: ProfileCurve, operation: str) -> None:
    if profile.pattern != ProfilePattern.PRIMARY:
        raise PatternMismatch(f"{operation} is stated for the primary pattern of {profile.family.value} only")


def immerse_full(fam: SurfaceFamily, profile: ProfileCurve, angle1: float, angle2: float, s: float) -> np.ndarray:
    """General two-angle immersion of the family, written out componentwise."""
    fam = _require_family(fam, profile)
    f1, f2, f3, f4 = profile.point(s)
    if fam == SurfaceFamily.S14:
        ch, sh = math.cosh(angle1), math.sinh(angle1)
        cb, sb = math.cosh(angle2), math.sinh(angle2)
        return np.array([f1 * ch + f3 * sh, f2 * cb + f4 * sb, f1 * sh + f3 * ch, f2 * sb + f4 * cb])
    if fam == SurfaceFamily.S23:
        ch, sh = math.cosh(angle1), math.sinh(angle1)
        cb, sb = math.cosh(angle2), math.sinh(angle2)
        return np.array([f1 * ch + f4 * sh, f2 * cb + f3 * sb, f2 * sb + f3 * cb, f1 * sh + f4 * ch])
    c, sn = math.cos(angle1), math.sin(angle1)
    cb, sb = math.cos(angle2), math.sin(angle2)
    return np.array([f1 * c + f2 * sn, -f1 * sn + f2 * c, f3 * cb + f4 * sb, -f3 * sb + f4 * cb])


def rotation_matrix(fam: SurfaceFamily, angle1: float, angle2: float) -> np.ndarray:
    """F1(angle1) F2(angle2) for the family's two generators."""
    g1, g2 = SurfaceFamily(fam).generators
    return flow_matrix(g1, angle1) @ flow_matrix(g2, angle2)


def immerse_curve_restricted(
    fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float
) -> np.ndarray:
    a, b = path.angles(t)
    return immerse_full(fam, profile, a, b, s)


def exact_jets(fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float) -> Vectors:
    """X_t, X_s, X_tt, X_ts, X_ss of the curve-restricted surface, in closed form."""
    fam = _require_family(fam, profile)
    g1, g2 = (generator_matrix(g) for g in fam.generators)
    (a, da, dda), (b, db, ddb) = path.jets(t)
    gamma, dgamma, ddgamma = profile.vectors(s)
    rot = rotation_matrix(fam, a, b)
    velocity = da * g1 + db * g2
    x = rot @ gamma
    x_s = rot @ dgamma
    x_t = velocity @ x
    x_tt = (dda * g1 + ddb * g2 + velocity @ velocity) @ x
    x_ts = velocity @ x_s
    x_ss = rot @ ddgamma
    return x_t, x_s, x_tt, x_ts, x_ss


def numeric_jets(fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float) -> Vectors:
    """The same five vectors by central differences of the immersion."""
    def X(tt: float, ss: float) -> np.ndarray:
        return immerse_curve_restricted(fam, profile, path, tt, ss)

    h, k = FD_STEP_FIRST, FD_STEP_SECOND
    x0 = X(t, s)
    x_t = (X(t + h, s) - X(t - h, s)) / (2 * h)
    x_s = (X(t, s + h) - X(t, s - h)) / (2 * h)
    x_tt = (X(t + k, s) - 2 * x0 + X(t - k, s)) / (k * k)
    x_ss = (X(t, s + k) - 2 * x0 + X(t, s - k)) / (k * k)
    x_ts = (X(t + k, s + k) - X(t + k, s - k) - X(t - k, s + k) + X(t - k, s - k)) / (4 * k * k)
    return x_t, x_s, x_tt, x_ts, x_ss


def _frame_vectors(
    fam: SurfaceFamily,
    variant: FormulaVariant,
    angles: Tuple[Jet, Jet],
    radii: Tuple[Jet, Jet],
) -> Tuple[np.ndarray, float, np.ndarray, float]:
    """Unnormalized e3, e4 and the radicands under their square roots."""
    (a, da, _), (b, db, _) = angles
    (p, dp, _), (q, dq, _) = radii
    if fam == SurfaceFamily.S14:
        # p = f1, q = f4; angles (x, alpha)
        ch, sh, cb, sb = math.cosh(a), math.sinh(a), math.cosh(b), math.sinh(b)
        v3 = np.array([q * db * sh, p * da * cb, q * db * ch, p * da * sb])
        v4 = np.array([dq * ch, dp * sb, dq * sh, dp * cb])
        return v3, q * q * db * db - p * p * da * da, v4, -dp * dp + dq * dq
    if fam == SurfaceFamily.S23:
        # p = f1, q = f2; angles (y, z)
        ch, sh, cb, sb = math.cosh(a), math.sinh(a), math.cosh(b), math.sinh(b)
        r3 = q * q * db * db + p * p * da * da
        r4 = dp * dp + dq * dq
        if variant == FormulaVariant.VERBATIM:
            v3 = np.array([q * db * sh, p * da * sb, p * da * cb, q * db * ch])
            v4 = np.array([dq * ch, dp * cb, dp * sb, dq * sh])
        else:
            v3 = np.array([q * db * sh, -p * da * sb, -p * da * cb, q * db * ch])
            v4 = np.array([dq * ch, -dp * cb, -dp * sb, dq * sh])
        return v3, r3, v4, r4
    # S56: p = f2, q = f4; angles (beta, theta)
    c, sn, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
    v3 = np.array([-q * db * c, q * db * sn, -p * da * cb, p * da * sb])
    v4 = np.array([dq * sn, dq * c, dp * sb, dp * cb])
    return v3, -p * p * da * da + q * q * db * db, v4, -dp * dp + dq * dq


def frame_radicands(fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float) -> Tuple[float, float]:
    """The two frame denominators (before the square root) at (t, s)."""
    fam = _require_family(fam, profile)
    _, r3, _, r4 = _frame_vectors(fam, FormulaVariant.CORRECTED, path.jets(t), profile.jets(s))
    return r3, r4


def _unit(v: np.ndarray, radicand: float, name: str) -> np.ndarray:
    if not abs(radicand) >= DEGENERACY_TOLERANCE:
        raise DegenerateFrame(f"{name} denominator {radicand:.3e} vanishes (null tangent direction)")
    return v / math.sqrt(abs(radicand))


def normal_frame(
    fam: SurfaceFamily,
    profile: ProfileCurve,
    path: AnglePath,
    t: float,
    s: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> Tuple[np.ndarray, np.ndarray]:
    """Unit normal pair (e3, e4) of the curve-restricted surface.

    The S23 vectors as printed are not orthogonal to the tangents; the
    corrected variant flips the sign of their rho and vartheta entries.

    Raises:
        DegenerateFrame: if either denominator is below the degeneracy tolerance
        PatternMismatch: for an alternate-pattern profile
    """
    fam = _require_family(fam, profile)
    _require_primary(profile, "normal_frame")
    path.check_domain(t)
    profile.check_domain(s)
    v3, r3, v4, r4 = _frame_vectors(fam, FormulaVariant(variant), path.jets(t), profile.jets(s))
    return _unit(v3, r3, "e3"), _unit(v4, r4, "e4")


def generic_normal_frame(x_t: np.ndarray, x_s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Unit normal pair of span(x_t, x_s) built from triple cross products.

    The helper basis vector is the one giving the least null first normal.
    """
    best, best_q = None, 0.0
    for i in range(4):
        n = cross3(x_t, x_s, basis(i))
        q = abs(inner(n, n))
        if q > best_q:
            best, best_q = n, q
    if best is None or not best_q >= DEGENERACY_TOLERANCE:
        raise DegenerateFrame("tangent plane admits no non-null normal")
    n1 = best / math.sqrt(best_q)
    n2 = cross3(x_t, x_s, n1)
    q2 = inner(n2, n2)
    return n1, _unit(n2, q2, "second normal")


def fundamental_forms(jets: Vectors, e3: np.ndarray, e4: np.ndarray) -> Tuple[float, float, float]:
    """K and the mean-curvature components on (e3, e4) from the two fundamental forms.

    K = sum eps_i (L_i N_i - M_i^2) / (EG - F^2) and
    H_i = eps_i (L_i G - 2 M_i F + N_i E) / (2 (EG - F^2)), eps_i = <e_i, e_i>.

    Raises:
        DegenerateMetric: if |EG - F^2| is below the degeneracy tolerance
    """
    x_t, x_s, x_tt, x_ts, x_ss = jets
    E, F, G = inner(x_t, x_t), inner(x_t, x_s), inner(x_s, x_s)
    det = E * G - F * F
    if not abs(det) >= DEGENERACY_TOLERANCE:
        raise DegenerateMetric(f"first fundamental form determinant {det:.3e} vanishes")
    K = 0.0
    H = []
    for e in (e3, e4):
        eps = 1.0 if inner(e, e) > 0 else -1.0
        L, M, N = inner(x_tt, e), inner(x_ts, e), inner(x_ss, e)
        K += eps * (L * N - M * M) / det
        H.append(eps * (L * G - 2 * M * F + N * E) / (2 * det))
    return K, H[0], H[1]


CurvatureTerms = Dict[str, float]

# Names of the closed-form pieces: K is the sum of the two K terms.
TERM_NAMES = ("K_meridian", "K_profile", "H_e3", "H_e4")


def _verbatim_terms(
    fam: SurfaceFamily,
    angles: Tuple[Jet, Jet],
    radii: Tuple[Jet, Jet],
    reading: ProductReading = ProductReading.SQUARED,
) -> CurvatureTerms:
    """The printed K terms, H_e3 and H_e4 (square roots taken of absolute values)."""
    (_, da, dda), (_, db, ddb) = angles
    (p, dp, ddp), (q, dq, ddq) = radii
    if fam == SurfaceFamily.S14:
        # p = f1, q = f4, (da, db) = (xdot, alphadot)
        r3 = q * q * db * db - p * p * da * da
        r4 = -dp * dp + dq * dq
        return {
            "K_meridian": (dp * q - p * dq) ** 2 * (da * db) ** 2 / r3,
            "K_profile": (dp * q * db * db - dq * p * da * da) * (dp * ddq - ddp * dq) / r4,
            "H_e3": (p * q * (dda * db + da * ddb) / (2 * math.sqrt(abs(r3)))
                     + (dq * p * da * da - dp * q * db * db) / (2 * math.sqrt(abs(r4)))),
            "H_e4": (dp * ddq - ddp * dq) / (2 * math.sqrt(abs(r4))),
        }
    if fam == SurfaceFamily.S23:
        # p = f1, q = f2, (da, db) = (ydot, zdot)
        r3 = q * q * db * db + p * p * da * da
        r4 = dp * dp + dq * dq
        return {
            "K_meridian": -(p * dq + dp * q) ** 2 * (da * db) ** 2 / r3,
            "K_profile": -(p * dq * da * da + dp * q * db * db) * (ddp * dq + dp * ddq) / r4,
            "H_e3": p * q * (da * ddb + dda * db) / (2 * math.sqrt(abs(r3))),
            "H_e4": (p * dq * da * da + dp * q * db * db - ddp * dq - dp * ddq) / (2 * math.sqrt(abs(r4))),
        }
    # S56: p = f2, q = f4, (da, db) = (betadot, thetadot)
    r3 = -p * p * da * da + q * q * db * db
    r4 = -dp * dp + dq * dq
    factor = dq * p * da * da - dp * q * db * db
    if ProductReading(reading) == ProductReading.SQUARED:
        factor = factor * factor
    return {
        "K_meridian": -(dp * q - p * dq) ** 2 * (da * db) ** 2 / r3,
        "K_profile": -(-ddp * dq + dp * ddq) * factor / r4,
        "H_e3": q * p * (da * ddb - db * dda) / (2 * math.sqrt(abs(r3))),
        "H_e4": (dq * p * da * da - dp * q * db * db + ddp * dq - dp * ddq) / (2 * math.sqrt(abs(r4))),
    }


def _corrected_terms(fam: SurfaceFamily, angles: Tuple[Jet, Jet], radii: Tuple[Jet, Jet]) -> CurvatureTerms:
    """K terms and mean curvatures on the corrected frame, in closed form.

    With the frame vectors v3, v4 of :func:`_frame_vectors` the second
    fundamental forms reduce to four profile/path products shared by all
    three families:

        twist = <X_ts, v3> = a'b'(p'q - pq')
        spin  = -<X_tt, v3> = pq(a'b'' - a''b')    (<X_ss, v3> = 0)
        bend  = qp'b'^2 - pq'a'^2                 (<X_tt, v4> up to sign)
        turn  = <X_ss, v4> = p'q'' - p''q'        (<X_ts, v4> = 0)

    and the first form is diagonal with |EG| = |r3 r4|.  The printed
    formulas drop that determinant from K (S14 K is off by the factor
    r3 r4), and S23 carries the opposite orientation of both normals.
    """
    (_, da, dda), (_, db, ddb) = angles
    (p, dp, ddp), (q, dq, ddq) = radii
    _, r3, _, r4 = _frame_vectors(fam, FormulaVariant.CORRECTED, angles, radii)
    twist = da * db * (dp * q - p * dq)
    spin = p * q * (da * ddb - dda * db)
    bend = q * dp * db * db - p * dq * da * da
    turn = dp * ddq - ddp * dq
    orientation = -1.0 if fam == SurfaceFamily.S23 else 1.0
    return {
        "K_meridian": twist * twist / (r3 * r3 * r4),
        "K_profile": bend * turn / (r3 * r4 * r4),
        "H_e3": orientation * spin / (2 * abs(r3) ** 1.5),
        "H_e4": orientation * (bend * r4 / r3 - turn) / (2 * abs(r4) ** 1.5),
    }


def curvature_terms(
    fam: SurfaceFamily,
    profile: ProfileCurve,
    path: AnglePath,
    t: float,
    s: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    reading: ProductReading = ProductReading.SQUARED,
) -> CurvatureTerms:
    """The closed-form pieces behind :func:`curvature_closed`, keyed by TERM_NAMES.

    ``reading`` only affects the verbatim S56 K_profile term.

    Raises:
        DegenerateFrame: if a frame denominator vanishes
        PatternMismatch: for an alternate-pattern profile
    """
    variant = FormulaVariant(variant)
    fam = _require_family(fam, profile)
    normal_frame(fam, profile, path, t, s, variant)
    if variant == FormulaVariant.VERBATIM:
        return _verbatim_terms(fam, path.jets(t), profile.jets(s), reading)
    return _corrected_terms(fam, path.jets(t), profile.jets(s))


def curvature_closed(
    fam: SurfaceFamily,
    profile: ProfileCurve,
    path: AnglePath,
    t: float,
    s: float,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    reading: ProductReading = ProductReading.SQUARED,
) -> CurvatureSample:
    """Closed-form Gaussian curvature and mean-curvature components.

    Args:
        fam: Surface family
        profile: Primary-pattern profile of the family
        path: Angle path (a(t), b(t))
        t: Path parameter
        s: Profile parameter
        variant: VERBATIM evaluates the printed formulas; CORRECTED the
            term-by-term corrected ones
        reading: Squared or unsquared reading of the printed S56 K

    Raises:
        DegenerateFrame: if a frame denominator vanishes
        PatternMismatch: for an alternate-pattern profile
    """
    variant = FormulaVariant(variant)
    fam = _require_family(fam, profile)
    e3, e4 = normal_frame(fam, profile, path, t, s, variant)
    terms = curvature_terms(fam, profile, path, t, s, variant, reading)
    return CurvatureSample(
        K=terms["K_meridian"] + terms["K_profile"],
        H_e3=terms["H_e3"],
        H_e4=terms["H_e4"],
        e3=e3,
        e4=e4,
        variant=variant,
    )


def curvature_exact(fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float) -> CurvatureSample:
    """Fundamental forms of the exact jets on the corrected frame.

    Same pipeline as the oracle without its truncation error; the closed
    form must agree with it to rounding.

    Raises:
        DegenerateFrame: if a frame denominator vanishes
        DegenerateMetric: if |EG - F^2| vanishes
    """
    fam = _require_family(fam, profile)
    e3, e4 = normal_frame(fam, profile, path, t, s, FormulaVariant.CORRECTED)
    K, H3, H4 = fundamental_forms(exact_jets(fam, profile, path, t, s), e3, e4)
    return CurvatureSample(K=K, H_e3=H3, H_e4=H4, e3=e3, e4=e4, variant=None)


def curvature_numeric(fam: SurfaceFamily, profile: ProfileCurve, path: AnglePath, t: float, s: float) -> CurvatureSample:
    """Finite-difference fundamental-forms oracle.

    Uses the corrected frame for primary patterns and a cross-product frame
    otherwise.

    Raises:
        DegenerateFrame: if the frame degenerates
        DegenerateMetric: if |EG - F^2| vanishes
    """
    fam = _require_family(fam, profile)
    jets = numeric_jets(fam, profile, path, t, s)
    if profile.pattern == ProfilePattern.PRIMARY:
        e3, e4 = normal_frame(fam, profile, path, t, s, FormulaVariant.CORRECTED)
    else:
        e3, e4 = generic_normal_frame(jets[0], jets[1])
    K, H3, H4 = fundamental_forms(jets, e3, e4)
    return CurvatureSample(K=K, H_e3=H3, H_e4=H4, e3=e3, e4=e4, variant=None)


def curvature_orbit_numeric(fam: SurfaceFamily, profile: ProfileCurve, s: float, angle1: float, angle2: float) -> CurvatureSample:
    """Curvature of the two-angle orbit surface (a, b) -> F1(a) F2(b) gamma(s) at fixed s.

    For S56 with constant radii this is the flat product of two circles.
    """
    fam = _require_family(fam, profile)
    g1, g2 = (generator_matrix(g) for g in fam.generators)
    x = rotation_matrix(fam, angle1, angle2) @ profile.point(s)
    jets = (g1 @ x, g2 @ x, g1 @ g1 @ x, g1 @ g2 @ x, g2 @ g2 @ x)
    e3, e4 = generic_normal_frame(jets[0], jets[1])
    K, H3, H4 = fundamental_forms(jets, e3, e4)
    return CurvatureSample(K=K, H_e3=H3, H_e4=H4, e3=e3, e4=e4, variant=None)


def curvature_deviation(closed: CurvatureSample, numeric: CurvatureSample) -> float:
    """Relative K deviation |K_closed - K_numeric| / max(|K_numeric|, 1)."""
    return abs(closed.K - numeric.K) / max(abs(numeric.K), 1.0)


def induced_metric3(
    fam: SurfaceFamily,
    profile: ProfileCurve,
    t: float,
    arclength_normalized: bool = False,
) -> DiagonalMetric3:
    """Diagonal induced metric of the family's 3-submanifold, checked at t.

    Raises:
        DegenerateMetric: if |A|, |B| or |C| vanishes at t

    Warns:
        NormalizationWarning: if arclength_normalized is requested where the
            actual eps_t C^2 differs from -1
    """
    fam = _require_family(fam, profile)
    metric = metric_from_profile(profile, arclength_normalized=arclength_normalized)
    metric.at(t)
    raw = metric.raw_t_coefficient(t)
    if arclength_normalized and raw is not None and abs(raw + 1.0) > NORMALIZATION_TOLERANCE:
        message = (
            f"arclength normalization replaces eps_t C^2 = {raw:.6g} by -1 at t = {t:.6g} "
            f"on {fam.submanifold}; the geodesics are those of a different metric"
        )
        logger.warning(message)
        warnings.warn(message, NormalizationWarning, stacklevel=2)
    return metric


def surface_sampler(
    fam: SurfaceFamily,
    profile: ProfileCurve,
    path: AnglePath,
    variant: FormulaVariant,
) -> Callable[[float, float], Tuple[np.ndarray, CurvatureSample]]:
    """Bind the surface so a mesh writer can call sample(t, s) -> (point, curvature)."""
    def sample(t: float, s: float) -> Tuple[np.ndarray, CurvatureSample]:
        return immerse_curve_restricted(fam, profile, path, t, s), curvature_closed(fam, profile, path, t, s, variant)

    return sample
