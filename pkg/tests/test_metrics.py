"""Tests for the Prometheus metrics module.

prometheus_client is installed in the test environment, so _init_metrics
genuinely creates metric objects. To avoid duplicate-registration errors
across test runs, each test uses an isolated CollectorRegistry by patching
the metric classes onto a fresh registry where needed.
"""

import unittest.mock

import pytest
from prometheus_client import CollectorRegistry, Counter, Histogram

import rotational_geodesics.metrics as metrics_mod

METRIC_NAMES = (
    "TRAJECTORIES", "STEPS", "INTEGRATION_SECONDS",
    "DEGENERATE_SAMPLES", "SWEEP_NODES", "CHECK_SUITES",
)


@pytest.fixture
def registry():
    """Fresh registry; the module-level metric objects are reset afterwards."""
    reg = CollectorRegistry()

    def _counter(*a, **kw):
        kw.setdefault("registry", reg)
        return Counter(*a, **kw)

    def _hist(*a, **kw):
        kw.setdefault("registry", reg)
        return Histogram(*a, **kw)

    with unittest.mock.patch.object(metrics_mod, "Counter", _counter), \
         unittest.mock.patch.object(metrics_mod, "Histogram", _hist), \
         unittest.mock.patch.object(metrics_mod, "HAS_PROMETHEUS", True):
        yield reg
    for name in METRIC_NAMES:
        setattr(metrics_mod, name, None)


class TestStartMetricsServer:
    def test_missing_prometheus_logs_and_returns(self):
        with unittest.mock.patch.object(metrics_mod, "HAS_PROMETHEUS", False):
            with unittest.mock.patch.object(metrics_mod, "start_http_server") as srv:
                metrics_mod.start_metrics_server()
                srv.assert_not_called()

    def test_init_failure_returns_without_server(self):
        with unittest.mock.patch.object(metrics_mod, "_init_metrics", return_value=False):
            with unittest.mock.patch.object(metrics_mod, "start_http_server") as srv:
                metrics_mod.start_metrics_server()
                srv.assert_not_called()

    def test_starts_server_on_configured_port(self):
        with unittest.mock.patch.object(metrics_mod, "_init_metrics", return_value=True):
            with unittest.mock.patch.object(metrics_mod, "start_http_server") as srv:
                with unittest.mock.patch.object(metrics_mod.settings, "metrics_port", 12345):
                    metrics_mod.start_metrics_server()
                srv.assert_called_once_with(12345)


class TestInitMetrics:
    def test_disabled_in_settings(self):
        assert metrics_mod.init_metrics() is False
        assert metrics_mod.TRAJECTORIES is None

    def test_creates_metric_objects(self, registry):
        assert metrics_mod._init_metrics() is True
        for name in METRIC_NAMES:
            assert getattr(metrics_mod, name) is not None

    def test_enabled_via_textfile(self, registry):
        with unittest.mock.patch.object(metrics_mod.settings, "metrics_textfile_enabled", True):
            assert metrics_mod.init_metrics() is True


class TestRecorders:
    def test_noop_when_uninitialised(self):
        metrics_mod.record_trajectory("S23", "completed", 10, 0.1)
        metrics_mod.record_degenerate_samples("S14", 3)
        metrics_mod.record_sweep_nodes(4)
        metrics_mod.record_check_suite("killing", True)

    def test_counts(self, registry):
        metrics_mod._init_metrics()
        metrics_mod.record_trajectory("S23", "completed", 10, 0.1)
        metrics_mod.record_degenerate_samples("S14", 3)
        metrics_mod.record_degenerate_samples("S14", 0)
        metrics_mod.record_sweep_nodes(4)
        metrics_mod.record_check_suite("killing", False)

        sample = registry.get_sample_value
        assert sample("geodesic_trajectories_total", {"family": "S23", "termination": "completed"}) == 1.0
        assert sample("geodesic_steps_total", {"family": "S23"}) == 10.0
        assert sample("geodesic_surface_degenerate_samples_total", {"family": "S14"}) == 3.0
        assert sample("geodesic_sweep_nodes_total") == 4.0
        assert sample("geodesic_check_suites_total", {"suite": "killing", "status": "fail"}) == 1.0


class TestTextfile:
    def test_skipped_without_path(self):
        assert metrics_mod.write_metrics_textfile() is False

    def test_written_when_initialised(self, registry, tmp_path):
        metrics_mod._init_metrics()
        path = tmp_path / "geodesics.prom"
        with unittest.mock.patch.object(metrics_mod, "REGISTRY", registry):
            assert metrics_mod.write_metrics_textfile(str(path)) is True
        assert "geodesic_sweep_nodes_total" in path.read_text(encoding="utf-8")
