"""RK4 integration of the geodesic equations with invariant monitoring.

Every recorded sample carries the conserved quantities (E, p_a, p_b), the
Clairaut products, the chart angles and the angular momentum l, so drift
in any of them is visible straight from the trajectory.

A step that hits a degenerate metric, changes the sign of a radius or of
the t-coefficient, or produces a non-finite state is discarded and the
trajectory ends there with reason DEGENERATE_METRIC.

Fixed-step runs advance a batch of trajectories in lockstep as one (N, 6)
array; a trajectory that stops early simply leaves the batch.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import metrics
from .clairaut import decompose_many
from .exceptions import DegenerateMetric
from .geodesics import conserved_momenta_many, geodesic_rhs, geodesic_rhs_many, rhs_from_coefficients
from .metric3 import CoefficientArrays, DiagonalMetric3
from .models import (
    DriftSummary,
    FormulaVariant,
    GeodesicState,
    InvariantRecord,
    StepPolicy,
    SurfaceFamily,
    TerminationReason,
    Trajectory,
)
from .physics import effective_energy_residual, specific_angular_momentum_many

logger = logging.getLogger(__name__)

# Step-doubling error estimate divisor for a fourth-order method: 2^4 - 1.
_RICHARDSON = 15.0


@dataclass(frozen=True)
class IntegratorOptions:
    policy: StepPolicy = StepPolicy.FIXED
    step: float = 1e-3
    tolerance: float = 1e-10
    min_step: float = 1e-9
    max_step: float = 0.1
    record_every: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


def invariant_records_many(
    family: Optional[SurfaceFamily],
    m: DiagonalMetric3,
    s: np.ndarray,
    Y: np.ndarray,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> List[InvariantRecord]:
    """invariant_record for every row of an (N, 6) state array sampled at s.

    The rows are assumed to lie where the metric is nondegenerate.
    """
    energy, p_a, p_b = conserved_momenta_many(m, Y)
    l = specific_angular_momentum_many(m, Y)
    if family is None:
        nan = np.full(len(Y), np.nan)
        speed = np.sqrt(2.0 * np.abs(energy))
        products, angles = (nan, nan), (nan, nan)
        in_range, residual = np.zeros(len(Y), dtype=bool), nan
    else:
        dec = decompose_many(family, m, Y, variant)
        speed = dec.speed
        products, angles = (dec.clairaut1, dec.clairaut2), (dec.phi, dec.theta)
        in_range, residual = dec.chart_in_range, dec.chart_residual

    columns = (
        np.broadcast_to(np.asarray(s, dtype=float), energy.shape), energy, p_a, p_b,
        products[0], products[1], speed, angles[0], angles[1], l, in_range, residual,
    )
    return [InvariantRecord(*row) for row in zip(*(np.asarray(c).tolist() for c in columns))]


def invariant_record(
    family: Optional[SurfaceFamily],
    m: DiagonalMetric3,
    s: float,
    y: np.ndarray,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
) -> InvariantRecord:
    """Conserved quantities, Clairaut products and chart angles at one sample.

    Raises:
        DegenerateMetric: if the metric is degenerate at the sample
    """
    y = np.asarray(y, dtype=float)
    m.at(y[2])
    return invariant_records_many(family, m, np.array([s]), y[None, :], variant)[0]


def rk4_step(m: DiagonalMetric3, y: np.ndarray, h: float) -> np.ndarray:
    k1 = geodesic_rhs(m, y)
    k2 = geodesic_rhs(m, y + 0.5 * h * k1)
    k3 = geodesic_rhs(m, y + 0.5 * h * k2)
    k4 = geodesic_rhs(m, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step_many(m: DiagonalMetric3, Y: np.ndarray, c: CoefficientArrays, h: float):
    """One RK4 step of every row, given the coefficients at Y.

    Returns (Y_new, coefficients at Y_new, rows whose metric degenerated at
    an inner stage or at Y_new).
    """
    k1 = rhs_from_coefficients(c, Y)
    k2, bad2 = geodesic_rhs_many(m, Y + 0.5 * h * k1)
    k3, bad3 = geodesic_rhs_many(m, Y + 0.5 * h * k2)
    k4, bad4 = geodesic_rhs_many(m, Y + h * k3)
    with np.errstate(invalid="ignore", over="ignore"):
        Y_new = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    c_new = m.at_many(Y_new[:, 2])
    return Y_new, c_new, bad2 | bad3 | bad4 | c_new.degenerate


def _validate(m: DiagonalMetric3, y: np.ndarray, signs0) -> None:
    if not np.all(np.isfinite(y)):
        raise DegenerateMetric(f"non-finite state {y.tolist()}")
    m.at(y[2])
    if m.signs(y[2]) != signs0:
        raise DegenerateMetric(f"radius or t-coefficient changed sign at t = {y[2]:.6g}")


def _failure_message(m: DiagonalMetric3, y: np.ndarray, signs0) -> str:
    """Why a batched step was discarded, worded like the scalar checks."""
    if not np.all(np.isfinite(y)):
        return f"non-finite state {y.tolist()}"
    try:
        m.at(y[2])
    except DegenerateMetric as e:
        return str(e)
    if m.signs(y[2]) != signs0:
        return f"radius or t-coefficient changed sign at t = {y[2]:.6g}"
    return f"metric degenerate inside the step ending at t = {y[2]:.6g}"


def _new_trajectory(family, options: IntegratorOptions, variant: FormulaVariant) -> Trajectory:
    adaptive = options.policy == StepPolicy.ADAPTIVE
    return Trajectory(
        family=family,
        step_policy=options.policy,
        step=options.step,
        tolerance=options.tolerance if adaptive else None,
        variant=variant,
    )


def _check_inputs(states: Sequence[GeodesicState], s_end: float) -> None:
    if not s_end > 0:
        raise ValueError(f"s_end must be positive, got {s_end}")
    for st in states:
        if not st.is_finite:
            raise ValueError(f"initial state must be finite: {st}")


def integrate_many(
    m: DiagonalMetric3,
    states: Sequence[GeodesicState],
    s_end: float,
    options: Optional[IntegratorOptions] = None,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    family: Optional[SurfaceFamily] = None,
) -> List[Trajectory]:
    """Integrate several geodesics on one metric with the fixed step policy.

    All trajectories share the step sequence, so each comes out as
    :func:`integrate` would produce it alone.  Invariant records are
    computed in one pass once the batch is done.

    Raises:
        DegenerateMetric: if any initial state is degenerate
        ValueError: for the adaptive policy, a non-positive s_end or a
            non-finite initial state
    """
    options = options or IntegratorOptions()
    if options.policy != StepPolicy.FIXED:
        raise ValueError("batched integration supports the fixed step policy only")
    family = SurfaceFamily(family) if family is not None else m.family
    variant = FormulaVariant(variant)
    _check_inputs(states, s_end)
    if not states:
        return []

    Y = np.array([st.as_array() for st in states])
    for y in Y:
        m.at(y[2])
    n = len(Y)
    c = m.at_many(Y[:, 2])
    signs0 = c.signs
    trajs = [_new_trajectory(family, options, variant) for _ in range(n)]

    rows = np.arange(n)
    accepted = np.zeros(n, dtype=int)
    recorded_at = np.zeros(n, dtype=int)
    snap_s, snap_rows, snap_y = [np.zeros(n)], [rows], [Y]

    started = time.perf_counter()
    s, h, steps = 0.0, options.step, 0
    end_eps = 1e-12 * max(1.0, s_end)
    while rows.size and s_end - s > end_eps:
        h_try = min(h, s_end - s)
        Y_new, c_new, bad = rk4_step_many(m, Y, c, h_try)
        bad |= ~np.all(np.isfinite(Y_new), axis=1)
        bad |= np.any(c_new.signs != signs0[rows], axis=1)
        if bad.any():
            for i in np.flatnonzero(bad):
                traj = trajs[rows[i]]
                traj.termination = TerminationReason.DEGENERATE_METRIC
                reason = _failure_message(m, Y_new[i], tuple(signs0[rows[i]].tolist()))
                traj.message = f"{reason} (s = {s:.6g})"
            stopped = rows[bad]
            unrecorded = recorded_at[stopped] != accepted[stopped]
            if unrecorded.any():
                snap_s.append(np.full(int(unrecorded.sum()), s))
                snap_rows.append(stopped[unrecorded])
                snap_y.append(Y[bad][unrecorded])
            rows, Y_new = rows[~bad], Y_new[~bad]
            c_new = m.at_many(Y_new[:, 2])

        s += h_try
        steps += 1
        Y, c = Y_new, c_new
        accepted[rows] = steps
        if steps % options.record_every == 0 or s_end - s <= end_eps:
            snap_s.append(np.full(rows.size, s))
            snap_rows.append(rows)
            snap_y.append(Y)
            recorded_at[rows] = steps

    records = invariant_records_many(family, m, np.concatenate(snap_s), np.vstack(snap_y), variant)
    for row, y, record in zip(np.concatenate(snap_rows).tolist(), np.vstack(snap_y), records):
        trajs[row].states.append(GeodesicState.from_array(y))
        trajs[row].records.append(record)

    elapsed = time.perf_counter() - started
    label = family.value if family else "custom"
    logger.debug(f"{n} geodesic(s) on {label}: {steps} lockstep steps in {elapsed:.3f}s")
    for row, traj in enumerate(trajs):
        traj.accepted_steps = int(accepted[row])
        if traj.terminated_early:
            logger.warning(
                f"Geodesic on {label} stopped at s={traj.records[-1].s:.6g}: {traj.termination.value}, {traj.message}"
            )
        # wall time is shared evenly across the batch
        metrics.record_trajectory(label, traj.termination.value, traj.accepted_steps, elapsed / n)
    return trajs


def integrate(
    m: DiagonalMetric3,
    st0: GeodesicState,
    s_end: float,
    options: Optional[IntegratorOptions] = None,
    variant: FormulaVariant = FormulaVariant.CORRECTED,
    family: Optional[SurfaceFamily] = None,
) -> Trajectory:
    """Integrate the geodesic from s = 0 to s_end.

    Args:
        m: Induced metric
        st0: Initial state
        s_end: Final affine parameter
        options: Step policy and sizes (fixed RK4 at h = 1e-3 by default)
        variant: Chart used for the recorded angles
        family: Surface family; defaults to the metric's

    Returns:
        Trajectory; early termination is reported in its ``termination``
        field, not raised

    Raises:
        DegenerateMetric: if the initial state itself is degenerate
    """
    options = options or IntegratorOptions()
    if options.policy == StepPolicy.FIXED:
        return integrate_many(m, [st0], s_end, options, variant, family)[0]

    family = SurfaceFamily(family) if family is not None else m.family
    variant = FormulaVariant(variant)
    _check_inputs([st0], s_end)

    y = st0.as_array()
    m.at(y[2])
    signs0 = m.signs(y[2])
    traj = _new_trajectory(family, options, variant)
    traj.states.append(GeodesicState.from_array(y))
    traj.records.append(invariant_record(family, m, 0.0, y, variant))

    started = time.perf_counter()
    s, h = 0.0, options.step
    end_eps = 1e-12 * max(1.0, s_end)
    recorded_at = 0
    while s_end - s > end_eps:
        h_try = min(h, s_end - s)
        try:
            y_full = rk4_step(m, y, h_try)
            y_half = rk4_step(m, rk4_step(m, y, 0.5 * h_try), 0.5 * h_try)
            err = float(np.max(np.abs(y_half - y_full))) / _RICHARDSON
            if not err <= options.tolerance:
                traj.rejected_steps += 1
                h = h_try * max(0.2, 0.9 * (options.tolerance / err) ** 0.2) if math.isfinite(err) else 0.2 * h_try
                if h < options.min_step:
                    traj.termination = TerminationReason.STEP_UNDERFLOW
                    traj.message = f"step fell below {options.min_step:g} at s = {s:.6g}"
                    break
                continue
            factor = 2.0 if err == 0 else min(2.0, max(0.2, 0.9 * (options.tolerance / err) ** 0.2))
            _validate(m, y_half, signs0)
        except DegenerateMetric as e:
            traj.termination = TerminationReason.DEGENERATE_METRIC
            traj.message = f"{e} (s = {s:.6g})"
            break

        s += h_try
        y = y_half
        h = min(h_try * factor, options.max_step)
        traj.accepted_steps += 1
        if traj.accepted_steps % options.record_every == 0 or s_end - s <= end_eps:
            traj.states.append(GeodesicState.from_array(y))
            traj.records.append(invariant_record(family, m, s, y, variant))
            recorded_at = traj.accepted_steps

    if recorded_at != traj.accepted_steps:
        traj.states.append(GeodesicState.from_array(y))
        traj.records.append(invariant_record(family, m, s, y, variant))

    elapsed = time.perf_counter() - started
    label = family.value if family else "custom"
    if traj.terminated_early:
        logger.warning(f"Geodesic on {label} stopped at s={s:.6g}: {traj.termination.value}, {traj.message}")
    else:
        logger.debug(f"Geodesic on {label}: {traj.accepted_steps} steps in {elapsed:.3f}s")
    metrics.record_trajectory(label, traj.termination.value, traj.accepted_steps, elapsed)
    return traj


def _max_abs_change(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values - values[0])))


def drift_summary(trajectory: Trajectory) -> DriftSummary:
    """Maximum drift of each monitored quantity from its initial value.

    E is relative to |E(0)|; p_a and p_b are relative to max(1, |p(0)|);
    the Clairaut products, the effective-energy residual and l are absolute.
    """
    energy = trajectory.column("energy")
    p_a = trajectory.column("p_a")
    p_b = trajectory.column("p_b")
    if trajectory.family is not None:
        phi = trajectory.column("phi")
        with np.errstate(invalid="ignore", over="ignore"):
            residual = effective_energy_residual(
                trajectory.family, energy, trajectory.column("speed"), phi,
                trajectory.column("theta"), trajectory.column("l"), trajectory.variant,
            )
        residual = np.where(np.isfinite(phi), residual, np.nan)
    else:
        residual = np.full(energy.shape, np.nan)
    return DriftSummary(
        energy=_max_abs_change(energy) / max(abs(energy[0]), 1e-300),
        p_a=_max_abs_change(p_a) / max(1.0, abs(p_a[0])),
        p_b=_max_abs_change(p_b) / max(1.0, abs(p_b[0])),
        clairaut1=_max_abs_change(trajectory.column("clairaut1")),
        clairaut2=_max_abs_change(trajectory.column("clairaut2")),
        residual=_max_abs_change(residual),
        l=_max_abs_change(trajectory.column("l")),
    )


def drift_thresholds(thresholds: Dict[str, float]) -> Dict[str, float]:
    """Thresholds keyed the way DriftSummary.to_dict() names its fields."""
    names = {"energy": "E", "momentum": "p_a", "clairaut": "clairaut1", "residual": "residual"}
    out: Dict[str, float] = {}
    for key, value in thresholds.items():
        name = names.get(key, key)
        out[name] = value
        if name == "p_a":
            out["p_b"] = value
        if name == "clairaut1":
            out["clairaut2"] = value
    return out
