"""Prometheus metrics for rotational-geodesics.

Counts integrated trajectories, RK4 steps, degenerate curvature samples,
sweep nodes and check-suite outcomes.  All metrics use the ``geodesic_``
prefix.  Runs are batch jobs, so besides the HTTP endpoint the registry
can be dumped to a node-exporter textfile at the end of a run.
"""

import logging
from typing import Optional

from .config import settings

logger = logging.getLogger(__name__)

try:
    from prometheus_client import (
        REGISTRY,
        Counter,
        Histogram,
        start_http_server,
        write_to_textfile,
    )
    HAS_PROMETHEUS = True
except ImportError:  # pragma: no cover - exercised by patching HAS_PROMETHEUS
    REGISTRY = None
    Counter = Histogram = None
    start_http_server = write_to_textfile = None
    HAS_PROMETHEUS = False

# ---------------------------------------------------------------------------
# Metric definitions
# ---------------------------------------------------------------------------
# Lazy-initialised: the objects are None until init_metrics() succeeds.
# All instrumentation call-sites go through the record_* helpers below,
# which silently no-op when metrics are disabled.
# ---------------------------------------------------------------------------

TRAJECTORIES: "Counter | None" = None
STEPS: "Counter | None" = None
INTEGRATION_SECONDS: "Histogram | None" = None
DEGENERATE_SAMPLES: "Counter | None" = None
SWEEP_NODES: "Counter | None" = None
CHECK_SUITES: "Counter | None" = None


def _init_metrics() -> bool:
    """Create all Prometheus metric objects.  Returns True on success."""
    global TRAJECTORIES, STEPS, INTEGRATION_SECONDS
    global DEGENERATE_SAMPLES, SWEEP_NODES, CHECK_SUITES

    if not HAS_PROMETHEUS:
        return False
    if TRAJECTORIES is not None:
        return True

    TRAJECTORIES = Counter(
        "geodesic_trajectories_total",
        "Integrated geodesics, by surface family and termination reason",
        ["family", "termination"],
    )
    STEPS = Counter(
        "geodesic_steps_total",
        "Accepted integration steps, by surface family",
        ["family"],
    )
    INTEGRATION_SECONDS = Histogram(
        "geodesic_integration_seconds",
        "Wall time of one trajectory integration in seconds",
        buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0),
    )
    DEGENERATE_SAMPLES = Counter(
        "geodesic_surface_degenerate_samples_total",
        "Surface grid samples skipped because the normal frame degenerated",
        ["family"],
    )
    SWEEP_NODES = Counter(
        "geodesic_sweep_nodes_total",
        "Sweep grid nodes integrated",
    )
    CHECK_SUITES = Counter(
        "geodesic_check_suites_total",
        "Verification suites run, by suite and outcome",
        ["suite", "status"],
    )
    return True


def init_metrics() -> bool:
    """Create the metric set if metrics are enabled in settings."""
    if not (settings.metrics_enabled or settings.metrics_textfile_enabled):
        return False
    if not HAS_PROMETHEUS:
        logger.warning("prometheus_client not installed, metrics disabled")
        return False
    return _init_metrics()


def start_metrics_server() -> None:
    """Start the Prometheus HTTP endpoint on settings.metrics_port."""
    if not HAS_PROMETHEUS:
        logger.warning("prometheus_client not installed, metrics endpoint disabled")
        return

    if not _init_metrics():
        logger.warning("Failed to initialise Prometheus metrics")
        return

    port = int(settings.metrics_port)
    start_http_server(port)
    logger.info(f"Metrics server listening on :{port}/metrics")


def write_metrics_textfile(path: Optional[str] = None) -> bool:
    """Write the default registry in text exposition format.  Returns True if written."""
    path = path or settings.metrics_textfile
    if not path or not HAS_PROMETHEUS or TRAJECTORIES is None:
        return False
    try:
        write_to_textfile(path, REGISTRY)
    except OSError as e:
        logger.error(f"Could not write metrics textfile {path}: {e}")
        return False
    logger.info(f"Metrics written to {path}")
    return True


def record_trajectory(family: str, termination: str, steps: int, seconds: float) -> None:
    if TRAJECTORIES is None:
        return
    TRAJECTORIES.labels(family=family, termination=termination).inc()
    STEPS.labels(family=family).inc(steps)
    INTEGRATION_SECONDS.observe(seconds)


def record_degenerate_samples(family: str, count: int) -> None:
    if DEGENERATE_SAMPLES is None or count <= 0:
        return
    DEGENERATE_SAMPLES.labels(family=family).inc(count)


def record_sweep_nodes(count: int) -> None:
    if SWEEP_NODES is None:
        return
    SWEEP_NODES.inc(count)


def record_check_suite(suite: str, passed: bool) -> None:
    if CHECK_SUITES is None:
        return
    CHECK_SUITES.labels(suite=suite, status="pass" if passed else "fail").inc()
