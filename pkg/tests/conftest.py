"""Shared test fixtures for rotational-geodesics.

Replaces the settings singleton before any package module binds it and
provides factory helpers so individual test files don't repeat profile,
path and metric boilerplate.
"""

import math
from typing import Optional, Sequence

import pytest

# ---------------------------------------------------------------------------
# Stub Settings singleton
# Must happen before any other rotational_geodesics imports.
# ---------------------------------------------------------------------------
import rotational_geodesics.config as _cfg_module  # noqa: E402


class FakeSettings:
    """Minimal Settings stub with all fields the codebase accesses."""
    log_level = "INFO"
    # Execution
    default_workers = 1
    output_dir = "out"
    # Observability
    metrics_enabled = False
    metrics_port = 9107
    metrics_textfile = None
    # Verification suites, small enough for unit tests
    check_seed = 7
    check_curvature_samples = 5
    check_geodesics_per_family = 10
    check_s_end = 1.0
    check_step = 1e-2
    # Properties
    metrics_textfile_enabled = False


_cfg_module.settings = FakeSettings()

# ---------------------------------------------------------------------------
# Now import the modules under test
# ---------------------------------------------------------------------------
from rotational_geodesics.metric3 import DiagonalMetric3, metric_from_profile  # noqa: E402
from rotational_geodesics.models import GeodesicState, ProfilePattern, SurfaceFamily  # noqa: E402
from rotational_geodesics.profiles import (  # noqa: E402
    AnglePath,
    ProfileCurve,
    ProfileKind,
    build_profile,
    linear_path,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def fake_settings():
    """Return the active FakeSettings instance."""
    return _cfg_module.settings


def make_profile(
    family: SurfaceFamily = SurfaceFamily.S23,
    kind: ProfileKind = ProfileKind.POLYNOMIAL,
    first: Sequence[float] = (2.0, 0.0, 1.0),
    second: Sequence[float] = (3.0, 0.0, 1.0),
    pattern: ProfilePattern = ProfilePattern.PRIMARY,
    scale: float = 1.0,
) -> ProfileCurve:
    """Create a catalog profile with sensible defaults for tests."""
    return build_profile(family, kind, pattern=pattern, scale=scale, first=first, second=second)


def make_path(rate_a: float = 1.0, rate_b: float = 1.0, offset_a: float = 0.0, offset_b: float = 0.0) -> AnglePath:
    """Linear angle path a(t) = offset_a + rate_a t, b(t) = offset_b + rate_b t."""
    return linear_path(rate_a, rate_b, offset_a, offset_b)


def make_metric(
    family: SurfaceFamily = SurfaceFamily.S23,
    first: Sequence[float] = (2.0, 0.0, 1.0),
    second: Optional[Sequence[float]] = None,
    arclength_normalized: bool = True,
) -> DiagonalMetric3:
    """Induced metric over a polynomial profile (arclength-normalized by default)."""
    if second is None:
        second = first if family == SurfaceFamily.S56 else (3.0, 0.0, 1.0)
    profile = make_profile(family, first=first, second=second)
    return metric_from_profile(profile, arclength_normalized=arclength_normalized)


def make_state(
    a: float = 0.0,
    b: float = 0.0,
    t: float = 0.5,
    va: float = 0.0,
    vb: float = 0.0,
    vt: float = 1.0,
) -> GeodesicState:
    return GeodesicState(a=a, b=b, t=t, va=va, vb=vb, vt=vt)


def rel_close(x: float, y: float, rel: float = 1e-9) -> bool:
    return abs(x - y) <= rel * max(1.0, abs(y)) and math.isfinite(x)
