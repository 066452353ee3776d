"""Tests for parameter sweeps."""

from unittest.mock import patch

import pytest

from rotational_geodesics import sweep
from rotational_geodesics.runconfig import ChartInitial, parse_config, serialize_config
from rotational_geodesics.sweep import grid_nodes, node_config, run_node, run_sweep

SWEEP_CONFIG = """\
family = S23
initial.form = chart
initial.a = 0.1
initial.t = 0.5
integrator.s_end = 0.2
integrator.step = 0.01
sweep.phi_min = 0.2
sweep.phi_max = 0.6
sweep.phi_count = 2
sweep.theta_min = -0.3
sweep.theta_max = 0.3
sweep.theta_count = 3
"""


class TestGrid:
    def test_nodes_are_phi_major(self):
        nodes = grid_nodes(parse_config(SWEEP_CONFIG))
        assert [n[0] for n in nodes] == list(range(6))
        assert nodes[0][1:] == (0.2, -0.3)
        assert nodes[2][2] == pytest.approx(0.3)
        assert nodes[3][1] == pytest.approx(0.6)

    def test_empty_grid(self):
        config = parse_config(SWEEP_CONFIG.replace("sweep.phi_count = 2", "sweep.phi_count = 0"))
        assert grid_nodes(config) == []
        with pytest.raises(ValueError, match="empty"):
            run_sweep(config, 1)

    def test_node_config_keeps_start_point(self):
        config = node_config(parse_config(SWEEP_CONFIG), 0.7, -0.1)
        assert isinstance(config.initial, ChartInitial)
        assert (config.initial.a, config.initial.t) == (0.1, 0.5)
        assert (config.initial.phi, config.initial.theta) == (0.7, -0.1)


class TestRunNode:
    def test_completed_node(self):
        text = serialize_config(parse_config(SWEEP_CONFIG))
        row = run_node(text, (4, 0.4, 0.0))
        assert row.termination == "completed"
        assert row.final_state is not None
        assert row.drift.energy < 1e-6
        assert row.to_row()[0] == 4

    def test_degenerate_start(self):
        text = serialize_config(parse_config(SWEEP_CONFIG.replace("initial.t = 0.5", "initial.t = 0.0")
                                             + "profile.first = 0.0, 1.0\n"))
        row = run_node(text, (0, 0.4, 0.0))
        assert row.termination == "invalid_start"
        assert row.final_state is None
        assert row.drift is None


class TestRunSweep:
    def test_rows_in_index_order(self):
        rows = run_sweep(parse_config(SWEEP_CONFIG), 1)
        assert [r.index for r in rows] == list(range(6))
        assert all(r.termination == "completed" for r in rows)

    def test_worker_count_does_not_change_rows(self):
        config = parse_config(SWEEP_CONFIG)
        inline = [r.to_row() for r in run_sweep(config, 1)]
        pooled = [r.to_row() for r in run_sweep(config, 2)]
        assert pooled == inline

    def test_records_metrics(self):
        with patch.object(sweep.metrics, "record_sweep_nodes") as record:
            run_sweep(parse_config(SWEEP_CONFIG), 1)
        record.assert_called_once_with(6)
