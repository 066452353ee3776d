"""Per-run configuration files.

A run file is flat ``dotted.key = value`` text::

    # Upsilon2 geodesic
    family = S23
    profile.kind = polynomial
    profile.first = 2.0, 0.0, 1.0
    profile.second = 3.0, 0.0, 1.0
    initial.form = chart
    initial.t = 0.5
    initial.phi = 0.4
    initial.theta = 0.3
    integrator.s_end = 10.0

Keys map onto the :class:`RunConfig` model tree; unknown keys, duplicate
keys and malformed values are all ConfigError.
"""

import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from .clairaut import unit_speed_state
from .exceptions import ConfigError
from .integrator import IntegratorOptions
from .metric3 import DiagonalMetric3, metric_from_profile
from .models import FormulaVariant, GeodesicState, ProductReading, ProfilePattern, StepPolicy, SurfaceFamily
from .profiles import AnglePath, ProfileCurve, ProfileKind, build_profile, polynomial_path


def _split_floats(value: Any) -> Any:
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        return [float(p) for p in parts if p]
    return value


FloatList = Annotated[List[float], BeforeValidator(_split_floats)]
# float() understands "inf" and "-inf", which serialize_config emits for open domains
Bound = Annotated[float, BeforeValidator(lambda v: float(v) if isinstance(v, str) else v)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProfileSection(_Section):
    kind: ProfileKind = ProfileKind.POLYNOMIAL
    pattern: ProfilePattern = ProfilePattern.PRIMARY
    scale: float = 1.0
    first: FloatList = Field(default_factory=lambda: [2.0, 0.0, 1.0])
    second: FloatList = Field(default_factory=lambda: [3.0, 0.0, 1.0])
    domain_min: Bound = -math.inf
    domain_max: Bound = math.inf

    def build(self, family: SurfaceFamily) -> ProfileCurve:
        return build_profile(
            family,
            self.kind,
            pattern=self.pattern,
            scale=self.scale,
            first=self.first,
            second=self.second,
            domain=(self.domain_min, self.domain_max),
        )


class PathSection(_Section):
    """Polynomial angle path; coefficients in increasing degree."""
    a: FloatList = Field(default_factory=lambda: [0.0, 1.0])
    b: FloatList = Field(default_factory=lambda: [0.0, 1.0])

    def build(self) -> AnglePath:
        return polynomial_path(self.a, self.b)


class GridSection(_Section):
    t_min: float = 0.2
    t_max: float = 1.2
    t_count: int = Field(default=20, ge=1)
    s_min: float = 0.2
    s_max: float = 1.2
    s_count: int = Field(default=20, ge=1)
    # S56 verbatim K only
    reading: ProductReading = ProductReading.SQUARED


class StateInitial(_Section):
    form: Literal["state"] = "state"
    a: float = 0.0
    b: float = 0.0
    t: float = 1.0
    va: float = 0.0
    vb: float = 0.0
    vt: float = 1.0

    def to_state(self, family: SurfaceFamily, metric: DiagonalMetric3, variant: FormulaVariant) -> GeodesicState:
        return GeodesicState(a=self.a, b=self.b, t=self.t, va=self.va, vb=self.vb, vt=self.vt)


class ChartInitial(_Section):
    form: Literal["chart"] = "chart"
    a: float = 0.0
    b: float = 0.0
    t: float = 1.0
    phi: float = 0.5
    theta: float = 0.2

    def to_state(self, family: SurfaceFamily, metric: DiagonalMetric3, variant: FormulaVariant) -> GeodesicState:
        return unit_speed_state(family, metric, self.a, self.b, self.t, self.phi, self.theta, variant)


Initial = Annotated[Union[StateInitial, ChartInitial], Field(discriminator="form")]


class IntegratorSection(_Section):
    policy: StepPolicy = StepPolicy.FIXED
    step: float = Field(default=1e-3, gt=0)
    tolerance: float = Field(default=1e-10, gt=0)
    s_end: float = Field(default=10.0, gt=0)
    record_every: int = Field(default=1, ge=1)

    def options(self) -> IntegratorOptions:
        return IntegratorOptions(
            policy=self.policy,
            step=self.step,
            tolerance=self.tolerance,
            record_every=self.record_every,
        )


class ThresholdSection(_Section):
    energy: float = Field(default=1e-8, gt=0)
    momentum: float = Field(default=1e-8, gt=0)
    clairaut: float = Field(default=1e-7, gt=0)
    residual: float = Field(default=1e-7, gt=0)

    def as_dict(self) -> Dict[str, float]:
        return self.model_dump()


class SweepSection(_Section):
    phi_min: float = 0.1
    phi_max: float = 1.0
    phi_count: int = Field(default=10, ge=0)
    theta_min: float = -0.5
    theta_max: float = 0.5
    theta_count: int = Field(default=10, ge=0)

    @property
    def size(self) -> int:
        return self.phi_count * self.theta_count


class RunConfig(_Section):
    family: SurfaceFamily
    variant: FormulaVariant = FormulaVariant.CORRECTED
    arclength_normalized: bool = True
    profile: ProfileSection = Field(default_factory=ProfileSection)
    path: PathSection = Field(default_factory=PathSection)
    grid: GridSection = Field(default_factory=GridSection)
    initial: Initial = Field(default_factory=ChartInitial)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    thresholds: ThresholdSection = Field(default_factory=ThresholdSection)
    sweep: SweepSection = Field(default_factory=SweepSection)

    @model_validator(mode="after")
    def _check_domain(self):
        if not self.profile.domain_min < self.profile.domain_max:
            raise ValueError("profile.domain_min must be below profile.domain_max")
        return self

    def build_profile(self) -> ProfileCurve:
        return self.profile.build(self.family)

    def build_metric(self, profile: Optional[ProfileCurve] = None) -> DiagonalMetric3:
        return metric_from_profile(profile or self.build_profile(), arclength_normalized=self.arclength_normalized)

    def with_variant(self, variant: Optional[FormulaVariant]) -> "RunConfig":
        if variant is None:
            return self
        return self.model_copy(update={"variant": FormulaVariant(variant)})


def _nest(pairs: List[tuple]) -> Dict[str, Any]:
    root: Dict[str, Any] = {}
    for lineno, key, value in pairs:
        node = root
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"line {lineno}: '{key}' uses '{part}' as a section but it is a value")
            node = child
        leaf = parts[-1]
        if leaf in node:
            kind = "section" if isinstance(node[leaf], dict) else "key"
            raise ConfigError(f"line {lineno}: duplicate {kind} '{key}'")
        node[leaf] = value
    return root


def parse_config(text: str) -> RunConfig:
    """Parse run-file text into a validated RunConfig.

    Raises:
        ConfigError: on syntax errors, unknown or duplicate keys, or invalid values
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or any(not p for p in key.split(".")):
            raise ConfigError(f"line {lineno}: malformed key {key!r}")
        pairs.append((lineno, key, value))

    try:
        return RunConfig.model_validate(_nest(pairs))
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid run config: {problems}") from e
    except ValueError as e:
        raise ConfigError(f"invalid run config: {e}") from e


def load_config(path: Union[str, Path]) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _flatten(prefix: str, data: Dict[str, Any], out: Dict[str, str]) -> None:
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            _flatten(f"{name}.", value, out)
        else:
            out[name] = _format_value(value)


def serialize_config(config: RunConfig) -> str:
    """Canonical text form: every key, sorted, floats via repr."""
    flat: Dict[str, str] = {}
    _flatten("", config.model_dump(), flat)
    return "".join(f"{key} = {flat[key]}\n" for key in sorted(flat))
