"""Run orchestration behind the command-line subcommands.

A :class:`GeodesicRunner` owns one run config and an output directory and
turns each subcommand into files plus a process exit code.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import export, metrics
from .exceptions import DegenerateFrame, DegenerateMetric
from .integrator import drift_summary, drift_thresholds, integrate
from .metric3 import DiagonalMetric3
from .models import FormulaVariant, ProfilePattern, Trajectory
from .physics import energy_report
from .runconfig import RunConfig
from .surfaces import curvature_closed, curvature_deviation, curvature_numeric, immerse_curve_restricted, induced_metric3
from .sweep import run_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE_SURFACE = 3
EXIT_EARLY_TERMINATION = 4

# Share of degenerate surface samples above which `surface` fails.
DEGENERATE_FRACTION_LIMIT = 0.10


class GeodesicRunner:
    """Executes surface, geodesic, sweep and plot runs for one config."""

    def __init__(self, config: RunConfig, out_dir: Path, allow_early: bool = False, workers: int = 1):
        self.config = config
        self.out_dir = Path(out_dir)
        self.allow_early = allow_early
        self.workers = workers

    # ------------------------------------------------------------------
    # surface
    # ------------------------------------------------------------------

    def surface(self) -> int:
        """Mesh CSV over the (t, s) grid plus a curvature summary."""
        cfg = self.config
        profile = cfg.build_profile()
        path = cfg.path.build()
        grid = cfg.grid
        ts = np.linspace(grid.t_min, grid.t_max, grid.t_count)
        ss = np.linspace(grid.s_min, grid.s_max, grid.s_count)
        primary = profile.pattern == ProfilePattern.PRIMARY
        if not primary:
            logger.warning(f"{cfg.family.value} alternate pattern: closed forms undefined, writing numeric curvature only")

        rows: List[list] = []
        curvatures: List[float] = []
        deviations: List[float] = []
        degenerate = 0
        first_failure: Optional[str] = None
        for t in ts:
            for s in ss:
                t, s = float(t), float(s)
                point = immerse_curve_restricted(cfg.family, profile, path, t, s)
                try:
                    numeric = curvature_numeric(cfg.family, profile, path, t, s)
                    if primary:
                        closed = curvature_closed(cfg.family, profile, path, t, s, cfg.variant, grid.reading)
                        deviation = curvature_deviation(closed, numeric)
                    else:
                        closed, deviation = numeric, math.nan
                except (DegenerateFrame, DegenerateMetric) as e:
                    degenerate += 1
                    first_failure = first_failure or f"t={t:.6g}, s={s:.6g}: {e}"
                    rows.append([t, s, *map(float, point), math.nan, math.nan, math.nan, math.nan])
                    continue
                curvatures.append(closed.K)
                deviations.append(deviation)
                rows.append([t, s, *map(float, point), closed.K, closed.H_e3, closed.H_e4, deviation])

        total = len(rows)
        export.write_csv(self.out_dir / "mesh.csv", export.MESH_HEADER, rows)
        metrics.record_degenerate_samples(cfg.family.value, degenerate)

        logger.info("=" * 60)
        logger.info(f"SURFACE {cfg.family.value} ({cfg.variant.value}), {total} samples")
        if curvatures:
            k = np.array(curvatures)
            logger.info(f"K: min={k.min():.6g} max={k.max():.6g} mean={k.mean():.6g}")
        dev = np.array([d for d in deviations if math.isfinite(d)])
        if dev.size:
            logger.info(f"|closed - numeric|: min={dev.min():.3e} max={dev.max():.3e} mean={dev.mean():.3e}")
        logger.info(f"Degenerate samples: {degenerate}/{total}")
        logger.info("=" * 60)

        if degenerate > DEGENERATE_FRACTION_LIMIT * total:
            logger.error(f"Normal frame degenerate at {degenerate}/{total} samples, first at {first_failure}")
            return EXIT_DEGENERATE_SURFACE
        return EXIT_OK

    # ------------------------------------------------------------------
    # geodesic
    # ------------------------------------------------------------------

    def run_geodesic(self) -> Tuple[DiagonalMetric3, Trajectory]:
        """Integrate the configured initial condition; returns the metric with the trajectory."""
        cfg = self.config
        profile = cfg.build_profile()
        metric = cfg.build_metric(profile)
        state = cfg.initial.to_state(cfg.family, metric, cfg.variant)
        induced_metric3(cfg.family, profile, state.t, arclength_normalized=cfg.arclength_normalized)
        return metric, integrate(
            metric,
            state,
            cfg.integrator.s_end,
            cfg.integrator.options(),
            variant=cfg.variant,
            family=cfg.family,
        )

    def geodesic(self) -> int:
        """Trajectory CSV/JSON, energy report and drift table."""
        cfg = self.config
        metric, traj = self.run_geodesic()
        export.write_trajectory_csv(self.out_dir / "trajectory.csv", traj)
        export.write_trajectory_json(self.out_dir / "trajectory.json", traj)

        if cfg.profile.pattern == ProfilePattern.PRIMARY:
            reports = [energy_report(cfg.family, metric, traj, v) for v in FormulaVariant]
            export.write_energy_report(self.out_dir / "energy.json", reports)

        drift = drift_summary(traj)
        logger.info("=" * 60)
        logger.info(
            f"GEODESIC {cfg.family.value}: {traj.accepted_steps} steps, "
            f"termination={traj.termination.value}"
        )
        for line in drift.format_message().splitlines():
            logger.info(line)
        logger.info("=" * 60)

        if traj.terminated_early and not self.allow_early:
            logger.error(f"Integration stopped early: {traj.message}")
            return EXIT_EARLY_TERMINATION
        exceeded = drift.exceeded(drift_thresholds(cfg.thresholds.as_dict()))
        if exceeded:
            logger.error(f"Drift above threshold: {', '.join(exceeded)}")
            return EXIT_FAILURE
        return EXIT_OK

    # ------------------------------------------------------------------
    # sweep
    # ------------------------------------------------------------------

    def sweep(self) -> int:
        """One summary row per (phi, theta) node."""
        if self.config.sweep.size == 0:
            logger.error("Sweep grid is empty")
            return EXIT_CONFIG
        rows = run_sweep(self.config, self.workers)
        export.write_sweep_csv(self.out_dir / "sweep.csv", rows)
        completed = sum(1 for r in rows if r.termination == "completed")
        logger.info("=" * 60)
        logger.info(f"SWEEP {self.config.family.value}: {completed}/{len(rows)} nodes completed")
        logger.info("=" * 60)
        return EXIT_OK

    # ------------------------------------------------------------------
    # plot
    # ------------------------------------------------------------------

    def plot(self) -> int:
        """Drift and orbit SVGs of the configured geodesic."""
        _, traj = self.run_geodesic()
        export.plot_drift_svg(self.out_dir / "drift.svg", traj)
        export.plot_orbit_svg(self.out_dir / "orbit.svg", traj)
        logger.info(f"Plots written to {self.out_dir}")
        if traj.terminated_early and not self.allow_early:
            logger.error(f"Integration stopped early: {traj.message}")
            return EXIT_EARLY_TERMINATION
        return EXIT_OK

