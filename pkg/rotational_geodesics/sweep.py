"""Parameter sweeps: one geodesic per (phi, theta) grid node.

Workers receive the serialized run config and rebuild everything from it,
so no state is shared between processes.  Rows come back in grid-index
order whatever the worker count.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from . import metrics
from .exceptions import DecompositionOutOfRange, DegenerateMetric
from .integrator import drift_summary, integrate
from .models import SweepRow
from .runconfig import ChartInitial, RunConfig, parse_config, serialize_config

logger = logging.getLogger(__name__)

Node = Tuple[int, float, float]


def grid_nodes(config: RunConfig) -> List[Node]:
    """(index, phi, theta) for every node, phi-major."""
    sw = config.sweep
    phis = np.linspace(sw.phi_min, sw.phi_max, sw.phi_count)
    thetas = np.linspace(sw.theta_min, sw.theta_max, sw.theta_count)
    nodes = []
    for i, phi in enumerate(phis):
        for j, theta in enumerate(thetas):
            nodes.append((i * sw.theta_count + j, float(phi), float(theta)))
    return nodes


def node_config(config: RunConfig, phi: float, theta: float) -> RunConfig:
    """The run config with its initial condition replaced by the chart angles of a node.

    The start point (a, b, t) is taken from the base initial condition.
    """
    base = config.initial
    initial = ChartInitial(a=base.a, b=base.b, t=base.t, phi=phi, theta=theta)
    return config.model_copy(update={"initial": initial})


def run_node(config_text: str, node: Node) -> SweepRow:
    index, phi, theta = node
    config = node_config(parse_config(config_text), phi, theta)
    try:
        metric = config.build_metric()
        state = config.initial.to_state(config.family, metric, config.variant)
        traj = integrate(
            metric,
            state,
            config.integrator.s_end,
            config.integrator.options(),
            variant=config.variant,
            family=config.family,
        )
    except (DecompositionOutOfRange, DegenerateMetric) as e:
        return SweepRow(index, phi, theta, None, None, "invalid_start", str(e))
    return SweepRow(
        index=index,
        phi=phi,
        theta=theta,
        final_state=traj.final_state,
        drift=drift_summary(traj),
        termination=traj.termination.value,
        message=traj.message,
    )


def run_sweep(config: RunConfig, workers: Optional[int] = None) -> List[SweepRow]:
    """Integrate every grid node and return the rows in index order.

    Args:
        config: Run config; its ``sweep`` section defines the grid
        workers: Process count; 1 (or None with default_workers = 1) runs inline

    Raises:
        ValueError: if the grid is empty
    """
    nodes = grid_nodes(config)
    if not nodes:
        raise ValueError("sweep grid is empty")
    text = serialize_config(config)
    workers = max(1, int(workers or 1))
    logger.info(f"Sweeping {len(nodes)} nodes on {config.family.submanifold} with {workers} worker(s)")

    if workers == 1:
        rows = [run_node(text, node) for node in nodes]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_node, [text] * len(nodes), nodes))

    rows.sort(key=lambda r: r.index)
    metrics.record_sweep_nodes(len(rows))
    early = sum(1 for r in rows if r.termination != "completed")
    if early:
        logger.warning(f"{early} of {len(rows)} sweep nodes did not complete")
    return rows
