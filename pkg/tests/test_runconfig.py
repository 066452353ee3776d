"""Tests for run-file parsing and serialization."""

import math

import pytest

from rotational_geodesics.exceptions import ConfigError
from rotational_geodesics.models import FormulaVariant, ProductReading, StepPolicy, SurfaceFamily
from rotational_geodesics.profiles import ProfileKind
from rotational_geodesics.runconfig import (
    ChartInitial,
    StateInitial,
    load_config,
    parse_config,
    serialize_config,
)

EXAMPLE = """
# Upsilon2 geodesic
family = S23
profile.kind = polynomial
profile.first = 2.0, 0.0, 1.0
profile.second = 3.0, 0.0, 1.0
initial.form = chart
initial.t = 0.5
initial.phi = 0.4
initial.theta = 0.3
integrator.s_end = 2.0   # short run
integrator.policy = adaptive
"""


class TestParseConfig:
    def test_example(self):
        config = parse_config(EXAMPLE)
        assert config.family == SurfaceFamily.S23
        assert config.profile.kind == ProfileKind.POLYNOMIAL
        assert config.profile.first == [2.0, 0.0, 1.0]
        assert isinstance(config.initial, ChartInitial)
        assert config.initial.phi == 0.4
        assert config.integrator.s_end == 2.0
        assert config.integrator.policy == StepPolicy.ADAPTIVE

    def test_defaults(self):
        config = parse_config("family = S56")
        assert config.variant == FormulaVariant.CORRECTED
        assert config.arclength_normalized is True
        assert config.sweep.size == 100
        assert config.thresholds.as_dict()["energy"] == 1e-8

    def test_normalization_key(self):
        config = parse_config("family = S23\narclength_normalized = false")
        assert config.arclength_normalized is False
        assert config.build_metric().arclength_normalized is False
        with pytest.raises(ConfigError, match="paper_normalized"):
            parse_config("family = S23\npaper_normalized = true")

    def test_s56_reading(self):
        assert parse_config("family = S56").grid.reading == ProductReading.SQUARED
        config = parse_config("family = S56\ngrid.reading = unsquared")
        assert config.grid.reading == ProductReading.UNSQUARED
        assert "grid.reading = unsquared" in serialize_config(config).splitlines()

    def test_state_initial(self):
        config = parse_config("family = S14\ninitial.form = state\ninitial.vt = 2.0")
        assert isinstance(config.initial, StateInitial)
        state = config.initial.to_state(config.family, config.build_metric(), config.variant)
        assert state.vt == 2.0

    def test_chart_initial_is_unit_speed(self):
        config = parse_config(EXAMPLE)
        metric = config.build_metric()
        state = config.initial.to_state(config.family, metric, config.variant)
        c = metric.at(state.t)
        assert c.g_aa * state.va ** 2 + c.g_bb * state.vb ** 2 + c.g_tt * state.vt ** 2 == pytest.approx(-1.0)

    def test_integrator_options(self):
        options = parse_config(EXAMPLE).integrator.options()
        assert options.policy == StepPolicy.ADAPTIVE
        assert options.step == 1e-3

    @pytest.mark.parametrize(
        "text,match",
        [
            ("family = S99", "family"),
            ("family = S23\nfamily = S14", "duplicate"),
            ("family = S23\nprofile.colour = red", "colour"),
            ("family = S23\nintegrator.step = -1", "step"),
            ("family = S23\njust some words", "key = value"),
            ("family = S23\nprofile..kind = polynomial", "malformed"),
            ("family = S23\nprofile = x\nprofile.kind = polynomial", "section"),
            ("family = S23\nprofile.first = 1.0, abc", "first"),
            ("profile.kind = polynomial", "family"),
            ("family = S23\nprofile.domain_min = 2\nprofile.domain_max = 1", "domain"),
        ],
    )
    def test_invalid(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)


class TestSerializeConfig:
    def test_round_trip(self):
        config = parse_config(EXAMPLE)
        text = serialize_config(config)
        assert parse_config(text) == config
        assert serialize_config(parse_config(text)) == text

    def test_canonical_form(self):
        text = serialize_config(parse_config("family = S23"))
        lines = text.splitlines()
        assert lines == sorted(lines)
        assert "arclength_normalized = true" in lines
        assert "profile.domain_min = -inf" in lines
        assert math.isinf(parse_config(text).profile.domain_min)


class TestLoadConfig:
    def test_reads_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(EXAMPLE, encoding="utf-8")
        assert load_config(path).family == SurfaceFamily.S23

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.cfg")

    def test_with_variant(self):
        config = parse_config(EXAMPLE)
        assert config.with_variant(None) is config
        assert config.with_variant(FormulaVariant.VERBATIM).variant == FormulaVariant.VERBATIM
