"""Verification suites behind the ``check`` subcommand.

Each suite draws its random inputs from one seeded generator, so a report
is reproducible for a given seed and suite selection.  Pass criteria are
always judged on the corrected formulas; the selected variant only decides
which numbers a suite reports next to them.  Verbatim-vs-corrected
differences found along the way are collected into a regression fixture.
"""

import logging
import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import export, metrics
from .clairaut import quadrature_slope, unit_speed_state
from .config import settings
from .exceptions import DecompositionOutOfRange, DegenerateFrame, DegenerateMetric, GeometryError, ImaginarySlope
from .integrator import IntegratorOptions, drift_summary, integrate, integrate_many
from .linalg import inner, space_form_membership
from .metric3 import DiagonalMetric3, metric_from_profile
from .models import (
    CurvatureSample,
    FormulaVariant,
    Generator,
    GeodesicState,
    KillingCoefficients,
    ProductReading,
    SpaceFormKind,
    SuiteResult,
    SurfaceFamily,
    Trajectory,
)
from .physics import energy_report
from .profiles import ProfileCurve, ProfileKind, build_profile, polynomial_path
from .runconfig import parse_config, serialize_config
from .surfaces import (
    TERM_NAMES,
    curvature_closed,
    curvature_deviation,
    curvature_exact,
    curvature_numeric,
    curvature_orbit_numeric,
    curvature_terms,
    exact_jets,
    frame_radicands,
    immerse_full,
)
from .symmetry import flow_matrix, lie_derivative_flat, lie_derivative_of_jacobian
from .sweep import run_sweep

logger = logging.getLogger(__name__)

KILLING_TOLERANCE = 1e-12
ISOMETRY_TOLERANCE = 1e-12
CURVATURE_TOLERANCE = 1e-4
EXACT_JET_TOLERANCE = 1e-9
FLAT_TOLERANCE = 5e-6
MEMBERSHIP_GRID = 7
ENERGY_DRIFT_TOLERANCE = 1e-8
MOMENTUM_DRIFT_TOLERANCE = 1e-8
CLAIRAUT_DRIFT_TOLERANCE = 1e-7
STEP_HALVING_RATIO = 12.0
QUADRATURE_TOLERANCE = 1e-4
QUADRATURE_PASS_RATE = 0.9
RESIDUAL_DRIFT_TOLERANCE = 1e-7

# Curvature samples closer than this to a null frame direction are skipped.
_FRAME_MARGIN = 0.05
_FIRST_FORM_MARGIN = 1e-2
# Quadrature samples with a smaller velocity component are turning points.
_TURNING_MARGIN = 1e-3

# Space-form catalog: (family, profile kind, expected kind)
MEMBERSHIP_CATALOG = (
    (SurfaceFamily.S14, ProfileKind.HYPERBOLIC, SpaceFormKind.PSEUDO_SPHERE),
    (SurfaceFamily.S23, ProfileKind.CIRCULAR, SpaceFormKind.PSEUDO_HYPERBOLIC),
    (SurfaceFamily.S56, ProfileKind.HYPERBOLIC_DUAL, SpaceFormKind.PSEUDO_HYPERBOLIC),
)

# Chart-angle ranges of random unit-speed starts, per family.
_CHART_RANGES = {
    SurfaceFamily.S14: ((-1.0, 1.0), (-math.pi, math.pi)),
    SurfaceFamily.S23: ((0.1, 1.0), (-math.pi, math.pi)),
    SurfaceFamily.S56: ((0.2, 1.3), (-0.8, 0.8)),
}

DETERMINISM_CONFIG = """\
family = S23
profile.kind = polynomial
profile.first = 2.0, 0.0, 1.0
profile.second = 3.0, 0.0, 1.0
initial.form = chart
initial.t = 0.5
integrator.s_end = 0.5
integrator.step = 0.01
sweep.phi_count = 10
sweep.theta_count = 10
"""


@dataclass
class CheckContext:
    rng: np.random.Generator
    variant: FormulaVariant
    fixture: Dict[str, Any] = field(default_factory=dict)


def geodesic_profile(fam: SurfaceFamily) -> ProfileCurve:
    """Polynomial profile whose radii stay away from zero for every t."""
    second = [2.0, 0.0, 1.0] if fam == SurfaceFamily.S56 else [3.0, 0.0, 1.0]
    return build_profile(fam, ProfileKind.POLYNOMIAL, first=[2.0, 0.0, 1.0], second=second)


def random_unit_state(rng: np.random.Generator, fam: SurfaceFamily, metric: DiagonalMetric3) -> GeodesicState:
    """Unit-speed start with random position and chart angles."""
    (phi_lo, phi_hi), (theta_lo, theta_hi) = _CHART_RANGES[fam]
    while True:
        a, b = rng.uniform(-0.5, 0.5, 2)
        t = rng.uniform(0.2, 1.0)
        phi = rng.uniform(phi_lo, phi_hi)
        theta = rng.uniform(theta_lo, theta_hi)
        try:
            return unit_speed_state(fam, metric, float(a), float(b), float(t), float(phi), float(theta))
        except DecompositionOutOfRange:
            continue


def _geodesics(
    ctx: CheckContext, fam: SurfaceFamily, count: int, s_end: float,
) -> Tuple[DiagonalMetric3, List[Trajectory]]:
    """Random unit-speed geodesics on the family's check profile, integrated as one batch."""
    metric = metric_from_profile(geodesic_profile(fam), arclength_normalized=True)
    options = IntegratorOptions(step=settings.check_step, record_every=10)
    states = [random_unit_state(ctx.rng, fam, metric) for _ in range(count)]
    return metric, integrate_many(metric, states, s_end, options, family=fam)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def check_killing(ctx: CheckContext) -> SuiteResult:
    worst = 0.0
    for _ in range(100):
        k = KillingCoefficients(*(float(x) for x in ctx.rng.uniform(0.0, 1.0, 6)))
        for p in ctx.rng.uniform(-1.0, 1.0, (100, 4)):
            worst = max(worst, float(np.max(np.abs(lie_derivative_flat(k, p)))))

    # scaling of the first slot is not an isometry
    control = np.zeros((4, 4))
    control[0, 0] = 1.0
    control_entry = float(lie_derivative_of_jacobian(control)[0, 0])

    passed = worst < KILLING_TOLERANCE and abs(control_entry) > 0.5
    return SuiteResult("killing", passed, {"max_entry": worst, "negative_control_entry": control_entry})


def check_isometry(ctx: CheckContext) -> SuiteResult:
    generators = list(Generator)
    worst_inner = 0.0
    for _ in range(10_000):
        g = generators[int(ctx.rng.integers(len(generators)))]
        m = flow_matrix(g, float(ctx.rng.uniform(-1.0, 1.0)))
        v, w = ctx.rng.uniform(-1.0, 1.0, (2, 4))
        worst_inner = max(worst_inner, abs(inner(m @ v, m @ w) - inner(v, w)))

    worst_group = 0.0
    for g in generators:
        for s, t in ctx.rng.uniform(-1.0, 1.0, (100, 2)):
            product = flow_matrix(g, s) @ flow_matrix(g, t)
            worst_group = max(worst_group, float(np.max(np.abs(product - flow_matrix(g, s + t)))))

    passed = worst_inner < ISOMETRY_TOLERANCE and worst_group < ISOMETRY_TOLERANCE
    return SuiteResult("isometry", passed, {"max_inner_error": worst_inner, "max_group_law_error": worst_group})


def _random_curvature_setup(rng: np.random.Generator, fam: SurfaceFamily):
    first = [rng.uniform(1.0, 2.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3)]
    second = [rng.uniform(1.0, 2.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3)]
    profile = build_profile(fam, ProfileKind.POLYNOMIAL, first=first, second=second)
    path = polynomial_path(
        [rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5), rng.uniform(-0.2, 0.2)],
        [rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5), rng.uniform(-0.2, 0.2)],
    )
    t, s = rng.uniform(0.2, 1.2, 2)
    return profile, path, float(t), float(s)


def _well_conditioned(fam, profile, path, t, s) -> bool:
    r3, r4 = frame_radicands(fam, profile, path, t, s)
    if abs(r3) < _FRAME_MARGIN or abs(r4) < _FRAME_MARGIN:
        return False
    x_t, x_s = exact_jets(fam, profile, path, t, s)[:2]
    det = inner(x_t, x_t) * inner(x_s, x_s) - inner(x_t, x_s) ** 2
    return abs(det) >= _FIRST_FORM_MARGIN


def _readings(fam: SurfaceFamily) -> List[ProductReading]:
    return list(ProductReading) if fam == SurfaceFamily.S56 else [ProductReading.SQUARED]


def _curvature_fixture_entry(fam, profile, path, t, s, numeric: CurvatureSample) -> Dict[str, Any]:
    """Both variants at one sample, plus which printed terms and readings survive.

    ``readings`` maps each reading of the printed K (``printed`` outside
    S56) to its value, whether it matches the oracle, and the printed
    terms that equal their corrected counterparts.
    """
    entry: Dict[str, Any] = {"t": t, "s": s, "oracle": {"K": numeric.K, "H_e3": numeric.H_e3, "H_e4": numeric.H_e4}}
    for variant in FormulaVariant:
        try:
            sample = curvature_closed(fam, profile, path, t, s, variant)
            entry[variant.value] = {"K": sample.K, "H_e3": sample.H_e3, "H_e4": sample.H_e4}
        except GeometryError as e:
            entry[variant.value] = {"error": str(e)}

    corrected = curvature_terms(fam, profile, path, t, s, FormulaVariant.CORRECTED)
    readings: Dict[str, Any] = {}
    for reading in _readings(fam):
        name = reading.value if fam == SurfaceFamily.S56 else "printed"
        try:
            printed = curvature_terms(fam, profile, path, t, s, FormulaVariant.VERBATIM, reading)
        except GeometryError as e:
            readings[name] = {"error": str(e)}
            continue
        K = printed["K_meridian"] + printed["K_profile"]
        readings[name] = {
            "K": K,
            "K_matches_oracle": abs(K - numeric.K) / max(abs(numeric.K), 1.0) <= CURVATURE_TOLERANCE,
            "matching_terms": [
                n for n in TERM_NAMES if math.isclose(printed[n], corrected[n], rel_tol=1e-9, abs_tol=1e-12)
            ],
        }
    entry["readings"] = readings
    return entry


def check_curvature(ctx: CheckContext) -> SuiteResult:
    target = settings.check_curvature_samples
    details: Dict[str, Any] = {}
    fixture: Dict[str, List[Dict[str, Any]]] = {}
    passed = True
    for fam in SurfaceFamily:
        accepted, attempts, worst, worst_exact, failures = 0, 0, 0.0, 0.0, 0
        reading_matches = {r.value: 0 for r in _readings(fam)}
        fixture[fam.value] = []
        while accepted < target and attempts < 20 * target:
            attempts += 1
            profile, path, t, s = _random_curvature_setup(ctx.rng, fam)
            try:
                if not _well_conditioned(fam, profile, path, t, s):
                    continue
                closed = curvature_closed(fam, profile, path, t, s, FormulaVariant.CORRECTED)
                exact = curvature_exact(fam, profile, path, t, s)
                numeric = curvature_numeric(fam, profile, path, t, s)
            except (DegenerateFrame, DegenerateMetric):
                continue
            accepted += 1
            deviation = curvature_deviation(closed, numeric)
            worst = max(worst, deviation)
            worst_exact = max(worst_exact, curvature_deviation(closed, exact))
            if not deviation <= CURVATURE_TOLERANCE:
                failures += 1
            entry = _curvature_fixture_entry(fam, profile, path, t, s, numeric)
            for reading in _readings(fam):
                name = reading.value if fam == SurfaceFamily.S56 else "printed"
                reading_matches[reading.value] += bool(entry["readings"][name].get("K_matches_oracle"))
            if len(fixture[fam.value]) < 5:
                fixture[fam.value].append(entry)
        details[fam.value] = {
            "samples": accepted,
            "max_deviation": worst,
            "max_deviation_from_exact_jets": worst_exact,
            "failures": failures,
            "printed_K_matches": reading_matches,
        }
        passed = passed and failures == 0 and accepted == target and worst_exact <= EXACT_JET_TOLERANCE

    worst_flat = 0.0
    for _ in range(20):
        c_a, c_b = ctx.rng.uniform(0.5, 2.0, 2)
        profile = build_profile(SurfaceFamily.S56, ProfileKind.CONSTANT, first=[c_a], second=[c_b])
        s, a, b = ctx.rng.uniform(-1.0, 1.0, 3)
        sample = curvature_orbit_numeric(SurfaceFamily.S56, profile, float(s), float(a), float(b))
        worst_flat = max(worst_flat, abs(sample.K))
    details["flat_S56_max_abs_K"] = worst_flat
    passed = passed and worst_flat < FLAT_TOLERANCE

    ctx.fixture["curvature"] = fixture
    return SuiteResult("curvature", passed, details)


def check_spaceform(ctx: CheckContext) -> SuiteResult:
    details: Dict[str, Any] = {}
    passed = True
    angles = np.linspace(-1.0, 1.0, MEMBERSHIP_GRID)
    params = np.linspace(0.2, 1.5, MEMBERSHIP_GRID)
    for fam, kind, expected in MEMBERSHIP_CATALOG:
        profile = build_profile(fam, kind)
        misses, worst = 0, 0.0
        for a in angles:
            for b in angles:
                for s in params:
                    result = space_form_membership(immerse_full(fam, profile, float(a), float(b), float(s)))
                    worst = max(worst, result.residual)
                    if result.kind != expected:
                        misses += 1
        details[fam.value] = {"expected": expected.value, "misses": misses, "max_residual": worst}
        passed = passed and misses == 0
    return SuiteResult("spaceform", passed, details)


def _final_error(a: Trajectory, b: Trajectory) -> float:
    return float(np.max(np.abs(a.final_state.as_array() - b.final_state.as_array())))


def check_conservation(ctx: CheckContext) -> SuiteResult:
    count = settings.check_geodesics_per_family
    details: Dict[str, Any] = {}
    passed = True
    for fam in SurfaceFamily:
        worst = {"E": 0.0, "p_a": 0.0, "p_b": 0.0, "clairaut1": 0.0, "clairaut2": 0.0}
        early = 0
        for traj in _geodesics(ctx, fam, count, settings.check_s_end)[1]:
            early += traj.terminated_early
            drift = drift_summary(traj).to_dict()
            for name in worst:
                if math.isfinite(drift[name]):
                    worst[name] = max(worst[name], drift[name])
        ok = (
            early == 0
            and worst["E"] < ENERGY_DRIFT_TOLERANCE
            and max(worst["p_a"], worst["p_b"]) < MOMENTUM_DRIFT_TOLERANCE
            and max(worst["clairaut1"], worst["clairaut2"]) < CLAIRAUT_DRIFT_TOLERANCE
        )
        details[fam.value] = {"trajectories": count, "early_terminations": early, "max_drift": worst}
        passed = passed and ok

    # global error at s = 5 against a fine reference
    fam = SurfaceFamily.S23
    metric = metric_from_profile(geodesic_profile(fam), arclength_normalized=True)
    st0 = random_unit_state(ctx.rng, fam, metric)

    def run(h: float) -> Trajectory:
        return integrate(metric, st0, 5.0, IntegratorOptions(step=h, record_every=1000), family=fam)

    reference = run(0.003125)
    coarse, fine = _final_error(run(0.05), reference), _final_error(run(0.025), reference)
    ratio = coarse / fine if fine > 0 else math.inf
    details["step_halving"] = {"error_h": coarse, "error_h_half": fine, "ratio": ratio}
    passed = passed and ratio >= STEP_HALVING_RATIO
    return SuiteResult("conservation", passed, details)


def check_quadrature(ctx: CheckContext) -> SuiteResult:
    details: Dict[str, Any] = {}
    passed = True
    count = max(1, settings.check_geodesics_per_family // 10)
    for fam in SurfaceFamily:
        compared, matched, imaginary = 0, 0, 0
        metric, trajectories = _geodesics(ctx, fam, count, settings.check_s_end / 2)
        for traj in trajectories:
            for st, rec in zip(traj.states, traj.records):
                if not rec.chart_in_range or abs(st.vt) < _TURNING_MARGIN:
                    continue
                c = metric.at(st.t)
                for angle, v_angle in ((1, st.va), (2, st.vb)):
                    if abs(v_angle) < _TURNING_MARGIN:
                        continue
                    observed = abs(st.vt / v_angle)
                    compared += 1
                    try:
                        expected = abs(quadrature_slope(
                            fam, rec.phi, rec.theta, 2.0 * rec.energy, c.f_a, c.f_b, angle, FormulaVariant.CORRECTED,
                        ))
                    except ImaginarySlope:
                        imaginary += 1
                        continue
                    if math.isfinite(expected) and abs(observed - expected) <= QUADRATURE_TOLERANCE * max(expected, 1e-12):
                        matched += 1
        rate = matched / compared if compared else 0.0
        details[fam.value] = {"samples": compared, "matched": matched, "imaginary": imaginary, "match_rate": rate}
        passed = passed and rate >= QUADRATURE_PASS_RATE

    # the printed Upsilon3 slope is imaginary exactly where L + sin^2(phi) < 0
    mismatches = 0
    for phi, theta, L in zip(
        ctx.rng.uniform(-math.pi, math.pi, 1000),
        ctx.rng.uniform(-1.0, 1.0, 1000),
        ctx.rng.uniform(-1.5, 0.5, 1000),
    ):
        sp = math.sin(phi)
        negative = bool(L + sp * sp < 0)
        try:
            quadrature_slope(SurfaceFamily.S56, phi, theta, L, 1.0, 1.0, 1, FormulaVariant.VERBATIM)
            raised = False
        except ImaginarySlope:
            raised = True
        mismatches += int(raised != negative)
    details["imaginary_detection_mismatches"] = mismatches
    passed = passed and mismatches == 0
    return SuiteResult("quadrature", passed, details)


def check_energy(ctx: CheckContext) -> SuiteResult:
    details: Dict[str, Any] = {}
    fixture: Dict[str, Any] = {}
    passed = True
    count = max(1, settings.check_geodesics_per_family // 10)
    for fam in SurfaceFamily:
        per_variant = {v.value: {"max_drift": 0.0, "max_abs_mean": 0.0} for v in FormulaVariant}
        metric, trajectories = _geodesics(ctx, fam, count, settings.check_s_end / 2)
        for traj in trajectories:
            for variant in FormulaVariant:
                report = energy_report(fam, metric, traj, variant)
                entry = per_variant[variant.value]
                entry["max_drift"] = _nan_max(entry["max_drift"], report.residual_max_drift)
                entry["max_abs_mean"] = _nan_max(entry["max_abs_mean"], abs(report.residual_mean))
        for entry in per_variant.values():
            entry["zeroes_residual"] = bool(
                entry["max_abs_mean"] < RESIDUAL_DRIFT_TOLERANCE and entry["max_drift"] < RESIDUAL_DRIFT_TOLERANCE
            )
        details[fam.value] = {"reported": per_variant[ctx.variant.value], "variants": per_variant}
        fixture[fam.value] = per_variant
        passed = passed and per_variant[FormulaVariant.CORRECTED.value]["max_drift"] < RESIDUAL_DRIFT_TOLERANCE
    ctx.fixture["energy_relation"] = fixture
    return SuiteResult("energy", passed, details)


def _nan_max(current: float, value: float) -> float:
    if math.isnan(current) or math.isnan(value):
        return math.nan
    return max(current, value)


def check_determinism(ctx: CheckContext) -> SuiteResult:
    config = parse_config(DETERMINISM_CONFIG)
    text = serialize_config(config)
    roundtrip = parse_config(text) == config and serialize_config(parse_config(text)) == text

    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, workers in enumerate((1, 1, 8)):
            path = Path(tmp) / f"sweep_{i}.csv"
            export.write_sweep_csv(path, run_sweep(config, workers))
            outputs.append(path.read_bytes())
    identical = all(o == outputs[0] for o in outputs)
    return SuiteResult(
        "determinism",
        roundtrip and identical,
        {"config_roundtrip": roundtrip, "sweep_identical": identical, "rows": config.sweep.size},
    )


SUITES: Dict[str, Callable[[CheckContext], SuiteResult]] = {
    "killing": check_killing,
    "isometry": check_isometry,
    "curvature": check_curvature,
    "spaceform": check_spaceform,
    "conservation": check_conservation,
    "quadrature": check_quadrature,
    "energy": check_energy,
    "determinism": check_determinism,
}


def run_checks(
    suites: Optional[List[str]] = None,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    out_dir: Optional[Path] = None,
    seed: Optional[int] = None,
) -> List[SuiteResult]:
    """Run the selected suites (all by default) and write the JSON report.

    Raises:
        ValueError: for an unknown suite name
    """
    names = suites or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")

    ctx = CheckContext(
        rng=np.random.default_rng(settings.check_seed if seed is None else seed),
        variant=FormulaVariant(variant),
    )
    results = []
    for name in names:
        started = time.perf_counter()
        try:
            result = SUITES[name](ctx)
        except GeometryError as e:
            logger.error(f"Suite {name} raised {type(e).__name__}: {e}")
            result = SuiteResult(name, False, {"error": f"{type(e).__name__}: {e}"})
        result.seconds = time.perf_counter() - started
        metrics.record_check_suite(name, result.passed)
        results.append(result)

    logger.info("=" * 60)
    for r in results:
        logger.info(f"{r.name:<14} {'PASS' if r.passed else 'FAIL'}  ({r.seconds:.2f}s)")
    logger.info("=" * 60)

    if out_dir is not None:
        out_dir = Path(out_dir)
        export.write_json(out_dir / "check_report.json", {
            "variant": ctx.variant.value,
            "passed": all(r.passed for r in results),
            "suites": [r.to_dict() for r in results],
        })
        if ctx.fixture:
            export.write_json(out_dir / "discrepancies.json", ctx.fixture)
    return results
