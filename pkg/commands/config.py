"""
Run configuration schema.

A run config is a JSON or YAML document validated by the pydantic models
below. Missing blocks take the values in ``config/defaults.yaml`` (or the
in-code defaults when that file is absent); the fully resolved config is what
``manifest.json`` echoes, so a manifest is itself a valid run config.
"""

import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.boundary import GrowthSampleSpec
from core.cones import ConeSpec
from core.errors import ConfigurationError
from core.params import GevreyParams
from core.quadrature import QuadratureSpec
from core.testfun import BumpFunction
from core.wavefront import PipelineSampling, WFSearch, WFVariant

logger = logging.getLogger(__name__)

DEFAULTS_PATH = "config/defaults.yaml"

Subcommand = Literal["assoc", "seqcheck", "bump", "bv", "wf", "verify"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsConfig(_Strict):
    tau: float = Field(1.0, gt=0, description="tau > 0")
    sigma: float = Field(2.0, gt=1, description="sigma > 1")
    h: float = Field(1.0, gt=0, description="h > 0")

    def to_params(self) -> GevreyParams:
        return GevreyParams(tau=self.tau, sigma=self.sigma, h=self.h)


class ToleranceConfig(_Strict):
    pairing: float = Field(1e-6, gt=0, description="Stokes vs direct pairing and oracle values")
    oracle: float = Field(1e-6, gt=0, description="Oracle consistency (finite differences, DTFT)")
    identity: float = Field(1e-9, gt=0, description="Exact identities (Parseval, linearity)")


class BumpShape(_Strict):
    center: List[float] = Field(default_factory=lambda: [0.0], min_length=1, max_length=2)
    r_plateau: float = Field(1.0, gt=0)
    r_support: float = Field(2.0, gt=0)
    max_order: int = Field(60, ge=0)

    @model_validator(mode="after")
    def _ordered(self) -> "BumpShape":
        if self.r_plateau >= self.r_support:
            raise ValueError("r_plateau must be smaller than r_support")
        return self

    def build(self) -> BumpFunction:
        return BumpFunction(
            center=tuple(self.center),
            r_plateau=self.r_plateau,
            r_support=self.r_support,
            max_order=self.max_order,
        )


class AssocConfig(_Strict):
    log_k_min: float = Field(2.0, description="ln of the first k")
    log_k_max: float = Field(20.0, description="ln of the last k")
    points: int = Field(200, ge=3)
    sandwich_points: int = Field(200, ge=10)
    sandwich_top: float = Field(1e8, gt=1)
    inequalities: bool = Field(False, description="Also verify the monotonicity, submultiplicativity and exchange inequalities")

    @model_validator(mode="after")
    def _range(self) -> "AssocConfig":
        if self.log_k_max <= self.log_k_min:
            raise ValueError("log_k_max must exceed log_k_min")
        return self


class SeqcheckConfig(_Strict):
    p_max: int = Field(100, ge=3)
    pq_max: int = Field(150, ge=1)
    power_p_max: int = Field(150, ge=1)


class BumpConfig(_Strict):
    shape: BumpShape = Field(default_factory=BumpShape)
    samples: int = Field(401, ge=3, description="Sample points per axis over the support")
    orders: List[int] = Field(default_factory=lambda: [0, 1, 2], description="Derivative orders along axis 0")
    norm_alpha_max: int = Field(20, ge=1)
    norm_grid_density: Optional[int] = Field(None, ge=3)

    @field_validator("orders")
    @classmethod
    def _nonnegative(cls, v: List[int]) -> List[int]:
        if not v or any(o < 0 for o in v):
            raise ValueError("orders must be a nonempty list of nonnegative integers")
        return v


class QuadratureConfig(_Strict):
    order: int = Field(32, ge=2)
    x_subpanels: int = Field(8, ge=1)
    t_min: float = Field(1e-6, gt=0, lt=1)
    tolerance: float = Field(1e-8, gt=0)
    max_refinements: int = Field(3, ge=0)

    def build(self) -> QuadratureSpec:
        return QuadratureSpec(
            order=self.order,
            x_subpanels=self.x_subpanels,
            t_min=self.t_min,
            tolerance=self.tolerance,
            max_refinements=self.max_refinements,
        )


class GrowthConfig(_Strict):
    H: float = Field(1.0, gt=0)
    t_min: float = Field(2e-2, gt=0)
    levels: int = Field(3, ge=1)
    x_points: int = Field(201, ge=3)

    def build(self) -> GrowthSampleSpec:
        return GrowthSampleSpec(t_min=self.t_min, levels=self.levels, x_points=self.x_points)


class BvConfig(_Strict):
    fixture: str = Field("inv_z", description="Tube fixture name")
    fixture_args: Dict[str, Any] = Field(default_factory=dict)
    bump: BumpShape = Field(default_factory=BumpShape)
    Y: List[float] = Field(default_factory=lambda: [0.5], min_length=1, max_length=2)
    methods: List[Literal["stokes", "direct"]] = Field(default_factory=lambda: ["stokes", "direct"])
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    direct_t_sequence: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4, 1e-5])
    growth: Optional[GrowthConfig] = Field(None, description="Run growth_check first when set")


class PipelineConfig(_Strict):
    fixture: str = Field("inv_z")
    fixture_args: Dict[str, Any] = Field(default_factory=dict)
    t: float = Field(1e-2, gt=0)
    n: int = Field(16384, ge=64)
    direction: Optional[List[float]] = None
    growth_H: float = Field(1.0, gt=0)

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError("n must be a power of two")
        return v

    def sampling(self) -> PipelineSampling:
        return PipelineSampling(
            t=self.t, n=self.n, direction=tuple(self.direction) if self.direction else None
        )


class WfConfig(_Strict):
    signal: Optional[str] = Field("heaviside", description="Signal fixture name")
    signal_args: Dict[str, Any] = Field(default_factory=dict)
    sample_file: Optional[str] = Field(None, description="Sample file with a sidecar .json")
    pipeline: Optional[PipelineConfig] = Field(None, description="Analyze a boundary-value proxy instead")
    points: List[List[float]] = Field(default_factory=lambda: [[-0.5], [0.0], [0.5]])
    cones: List[str] = Field(default_factory=lambda: ["+", "-"])
    variant: WFVariant = WFVariant.T_THRESHOLD
    h_grid: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    band: Optional[List[float]] = Field(None, min_length=2, max_length=2)
    pad_factor: int = Field(1, ge=1)
    window: BumpShape = Field(
        default_factory=lambda: BumpShape(r_plateau=0.15, r_support=0.4)
    )
    tau_grid: Optional[List[float]] = None

    @field_validator("points", mode="before")
    @classmethod
    def _wrap_points(cls, v: Any) -> Any:
        if isinstance(v, list):
            return [p if isinstance(p, list) else [p] for p in v]
        return v

    @field_validator("cones")
    @classmethod
    def _parse_cones(cls, v: List[str]) -> List[str]:
        for text in v:
            ConeSpec.parse(text)
        return v

    def cone_specs(self) -> List[ConeSpec]:
        return [ConeSpec.parse(text) for text in self.cones]

    def search(self) -> WFSearch:
        return WFSearch(
            h_grid=tuple(self.h_grid),
            band=tuple(self.band) if self.band else None,  # type: ignore[arg-type]
            pad_factor=self.pad_factor,
        )


class VerifyConfig(_Strict):
    fail_fast: bool = False
    groups: List[
        Literal["sequences", "associated", "testfun", "boundary", "wavefront", "determinism"]
    ] = Field(
        default_factory=lambda: ["sequences", "associated", "testfun", "boundary", "wavefront", "determinism"]
    )
    random_points: int = Field(50, ge=1, description="Random tube points for the Wirtinger check")


class RunConfig(_Strict):
    """Fully resolved configuration of one CLI run."""

    subcommand: Subcommand
    params: ParamsConfig = Field(default_factory=ParamsConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    out: str = Field("outputs", description="Output directory")
    seed: int = Field(0, ge=0, description="Seed of randomized property checks")
    jobs: int = Field(1, ge=1, description="Concurrent checks per verify group")
    timeout_seconds: float = Field(1800.0, gt=0)
    assoc: AssocConfig = Field(default_factory=AssocConfig)
    seqcheck: SeqcheckConfig = Field(default_factory=SeqcheckConfig)
    bump: BumpConfig = Field(default_factory=BumpConfig)
    bv: BvConfig = Field(default_factory=BvConfig)
    wf: WfConfig = Field(default_factory=WfConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)

    @field_validator("timeout_seconds")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("timeout_seconds must be finite")
        return v


def format_validation_error(error: ValidationError) -> str:
    """One line per problem, each led by the dotted path of the offending field."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return "; ".join(lines)


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_defaults(path: Union[str, Path] = DEFAULTS_PATH) -> Dict[str, Any]:
    """Defaults file contents, or {} with a warning when it does not exist."""
    if not os.path.exists(path):
        logger.warning(f"Defaults file not found at {path}, using in-code defaults")
        return {}
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"defaults file {path} must hold a mapping")
    return data


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON or YAML run config.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigurationError: If the content is not a mapping or does not parse
    """
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")
    text = config_path.read_text()
    try:
        if config_path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"cannot parse {config_path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{config_path} must hold a mapping at the top level")
    return data


def resolve_config(
    raw: Dict[str, Any],
    overrides: Optional[Dict[str, Any]] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Merge defaults, file content and CLI overrides, then validate.

    Raises:
        ConfigurationError: With the dotted path of every offending field
    """
    merged = _deep_merge(defaults or {}, raw)
    merged = _deep_merge(merged, {k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigurationError(format_validation_error(e)) from e


def manifest_of(config: RunConfig) -> Dict[str, Any]:
    """The resolved config as plain data; feeding it back reproduces the run."""
    return config.model_dump(mode="json")
