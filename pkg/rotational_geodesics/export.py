"""CSV, JSON and SVG output.

Data files carry no timestamps: floats are written with ``repr`` (shortest
round-trip form), JSON keys are sorted, and SVGs are rendered with a fixed
hash salt and no date, so identical runs give identical bytes.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .models import EnergyReport, SweepRow, Trajectory  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MESH_HEADER = ("t", "s", "c1", "c2", "c3", "c4", "K", "H_e3", "H_e4", "deviation")
TRAJECTORY_HEADER = (
    "s", "a", "b", "t", "va", "vb", "vt",
    "E", "p_a", "p_b", "clairaut1", "clairaut2", "V", "phi", "theta", "l",
)

plt.rcParams["svg.hashsalt"] = "rotational-geodesics"


def _cell(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """Write a header row and data rows.  Returns the number of data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return count


def _json_safe(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    elif isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_json(path: PathLike, data: Any) -> None:
    """UTF-8 JSON with sorted keys; NaN and infinities become null."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_json_safe(data), f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def trajectory_rows(trajectory: Trajectory) -> List[List[float]]:
    rows = []
    for st, rec in zip(trajectory.states, trajectory.records):
        rows.append([
            rec.s, st.a, st.b, st.t, st.va, st.vb, st.vt,
            rec.energy, rec.p_a, rec.p_b, rec.clairaut1, rec.clairaut2,
            rec.speed, rec.phi, rec.theta, rec.l,
        ])
    return rows


def write_trajectory_csv(path: PathLike, trajectory: Trajectory) -> int:
    return write_csv(path, TRAJECTORY_HEADER, trajectory_rows(trajectory))


def write_trajectory_json(path: PathLike, trajectory: Trajectory) -> None:
    samples = [dict(zip(TRAJECTORY_HEADER, row)) for row in trajectory_rows(trajectory)]
    write_json(path, {"metadata": trajectory.metadata(), "samples": samples})


def write_energy_report(path: PathLike, reports: Sequence[EnergyReport]) -> None:
    write_json(path, [r.to_dict() for r in reports])


def write_sweep_csv(path: PathLike, rows: Sequence[SweepRow]) -> int:
    return write_csv(path, SweepRow.HEADER, (r.to_row() for r in rows))


def _save_svg(fig, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote plot {path}")


def plot_drift_svg(path: PathLike, trajectory: Trajectory) -> None:
    """Invariant drift |q(s) - q(0)| against s for E, p_a, p_b and the Clairaut products."""
    s = trajectory.s_values
    fig, ax = plt.subplots(figsize=(8, 5))
    for name, label in (
        ("energy", "E"), ("p_a", "p_a"), ("p_b", "p_b"),
        ("clairaut1", "clairaut1"), ("clairaut2", "clairaut2"),
    ):
        values = trajectory.column(name)
        drift = abs(values - values[0])
        # log axis: floor exact zeros so the line stays visible
        ax.semilogy(s, drift + 1e-300, label=label)
    ax.set_xlabel("s")
    ax.set_ylabel("|q(s) - q(0)|")
    family = trajectory.family.submanifold if trajectory.family else "metric"
    ax.set_title(f"Invariant drift on {family}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save_svg(fig, path)


def plot_orbit_svg(path: PathLike, trajectory: Trajectory) -> None:
    """Projection of the orbit onto the (a, b) angle plane."""
    a = [st.a for st in trajectory.states]
    b = [st.b for st in trajectory.states]
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(a, b, color="royalblue")
    ax.scatter([a[0]], [b[0]], color="tomato", zorder=3, label="start")
    names = trajectory.family.angle_names if trajectory.family else ("a", "b")
    ax.set_xlabel(names[0])
    ax.set_ylabel(names[1])
    ax.set_title("Orbit in the angle plane")
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save_svg(fig, path)
