"""Run configuration models and the flat ``key = value`` config format.

Config files hold one ``key = value`` per line, ``#`` starts a comment and
nested settings use dotted keys::

    example_id = 2
    model = pcdgan
    vicinal.mode = soft
    eval.repeats = 10
"""
import math
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .data import DEFAULT_DATA_SEED, DEFAULT_N
from .errors import ContractViolation, MissingArtifactError
from .losses import DEFAULT_CUTOFF, VicinalConfig, gamma1_schedule
from .utils.helpers import short_hash

PathLike = Union[str, Path]
AUTO = "auto"


class EvalProtocol(BaseModel):
    """Condition sweep used by evaluate(); desk scale by default."""

    model_config = ConfigDict(extra="forbid")

    n_conditions: int = Field(10, ge=1)
    condition_min: float = Field(0.05, ge=0.05, le=0.95)
    condition_max: float = Field(0.95, ge=0.05, le=0.95)
    n_samples: int = Field(1000, ge=2)
    repeats: int = Field(3, ge=1)
    kde_bandwidth_min: float = Field(1e-3, gt=0)
    kde_bandwidth_max: float = Field(1.0, gt=0)
    kde_bandwidths: int = Field(20, ge=1)
    kde_folds: int = Field(5, ge=2)
    diversity_bandwidth: float = Field(1.0, gt=0)
    subset_size: int = Field(10, ge=1)
    n_subsets: int = Field(1000, ge=1)
    data_window: float = Field(0.025, gt=0)
    plot_condition: float = Field(0.4, ge=0.0, le=1.0)
    occupancy_radius: float = Field(0.25, gt=0)

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.condition_min > self.condition_max:
            raise ValueError("condition_min must not exceed condition_max")
        if self.kde_bandwidth_min > self.kde_bandwidth_max:
            raise ValueError("kde_bandwidth_min must not exceed kde_bandwidth_max")
        if self.subset_size > self.n_samples:
            raise ValueError("subset_size cannot exceed n_samples")
        return self

    @classmethod
    def desk(cls, **overrides) -> "EvalProtocol":
        return cls(**overrides)

    @classmethod
    def full(cls, **overrides) -> "EvalProtocol":
        return cls(**{"n_conditions": 100, "repeats": 10, **overrides})

    def conditions(self) -> np.ndarray:
        return np.linspace(self.condition_min, self.condition_max, self.n_conditions)

    def bandwidth_grid(self) -> np.ndarray:
        return np.logspace(math.log10(self.kde_bandwidth_min), math.log10(self.kde_bandwidth_max),
                           num=self.kde_bandwidths)


class VicinalSettings(BaseModel):
    """Vicinity options; unset widths come from the training labels."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["hard", "soft"] = "soft"
    sigma_vic: Optional[float] = Field(None, gt=0)
    kappa: Optional[float] = Field(None, gt=0)
    nu: Optional[float] = Field(None, gt=0)
    C1: float = Field(1.0, ge=0)
    C2: float = Field(1.0, ge=0)
    C3: float = Field(1.0, ge=0)
    C4: float = Field(1.0, ge=0)
    soft_pool: Literal["all", "vicinity"] = "all"
    soft_weight_threshold: float = Field(1e-3, gt=0, lt=1)

    @field_validator("sigma_vic", "kappa", "nu", mode="before")
    @classmethod
    def _auto_is_unset(cls, value):
        if isinstance(value, str) and value.strip().lower() in (AUTO, "none", ""):
            return None
        return value

    def resolve(self, labels, label_sampling: str) -> VicinalConfig:
        return VicinalConfig.from_labels(
            labels, sigma_vic=self.sigma_vic, kappa=self.kappa, nu=self.nu,
            mode=self.mode, label_sampling=label_sampling,
            C1=self.C1, C2=self.C2, C3=self.C3, C4=self.C4,
            soft_pool=self.soft_pool, soft_weight_threshold=self.soft_weight_threshold,
        )


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    example_id: int = 1
    model: Literal["pcdgan", "ccgan"] = "pcdgan"
    seed: int = Field(0, ge=0)
    data_seed: int = Field(DEFAULT_DATA_SEED, ge=0)
    n_data: int = Field(DEFAULT_N, ge=2)

    steps: int = Field(50_000, ge=1)
    batch_size: int = Field(32, ge=1)
    lr_g: float = Field(1e-4, gt=0)
    lr_d: float = Field(1e-4, gt=0)
    beta1: float = Field(0.5, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    lr_decay: float = Field(0.8, gt=0, le=1)
    lr_decay_every: int = Field(5000, ge=1)

    noise_dim: int = Field(5, ge=1)
    hidden: Tuple[int, ...] = (128, 128, 128)
    leaky_slope: float = Field(0.2, ge=0)

    gamma0: float = Field(3.0, ge=0)
    gamma1: float = Field(0.5, ge=0)
    gamma1_schedule: Literal["constant", "escalating"] = "constant"
    gamma1_escalation: float = Field(5.0, gt=0)
    lambert_a: float = Field(DEFAULT_CUTOFF, ge=math.e / 2, le=10.0)
    dpp_bandwidth: float = Field(1.0, gt=0)
    dpp_jitter: float = Field(1e-6, ge=0)
    realistic_quality: bool = False

    label_sampling: Optional[Literal["singular", "uniform"]] = None
    discriminator_training: Literal["mixed", "separated"] = "mixed"
    vicinal: VicinalSettings = Field(default_factory=VicinalSettings)

    log_every: int = Field(100, ge=1)
    checkpoint_every: int = Field(5000, ge=1)
    eval: EvalProtocol = Field(default_factory=EvalProtocol.desk)

    @field_validator("example_id")
    @classmethod
    def _known_example(cls, value):
        if value not in (1, 2):
            raise ValueError("example_id must be 1 or 2")
        return value

    @field_validator("hidden", mode="before")
    @classmethod
    def _split_hidden(cls, value):
        if isinstance(value, str):
            return tuple(int(part) for part in value.split(",") if part.strip())
        return value

    @field_validator("hidden")
    @classmethod
    def _positive_widths(cls, value):
        if not value or any(width < 1 for width in value):
            raise ValueError("hidden layer widths must be positive")
        return value

    @field_validator("label_sampling", mode="before")
    @classmethod
    def _auto_sampling(cls, value):
        if isinstance(value, str) and value.strip().lower() in (AUTO, "none", ""):
            return None
        return value

    @model_validator(mode="after")
    def _apply_model(self):
        # ccgan is the pcdgan path without the DPP term and with data-drawn labels
        if self.model == "ccgan":
            self.gamma1 = 0.0
            self.label_sampling = "uniform"
        elif self.label_sampling is None:
            self.label_sampling = "singular"
        return self

    def gamma1_at(self, t: int) -> float:
        if self.gamma1_schedule == "constant":
            return self.gamma1
        return gamma1_schedule(min(t, self.steps), self.steps, self.gamma1, self.gamma1_escalation)

    def flat(self) -> Dict[str, Any]:
        return _flatten(self.model_dump())

    def echo(self) -> str:
        """Canonical sorted ``key = value`` text; identical configs echo identically."""
        return "\n".join(f"{key} = {_render(value)}" for key, value in sorted(self.flat().items()))

    def content_hash(self) -> str:
        return short_hash(self.echo())

    def run_name(self) -> str:
        return f"ex{self.example_id}-{self.model}-seed{self.seed}-{self.content_hash()}"


def _flatten(values: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _render(value: Any) -> str:
    if value is None:
        return AUTO
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Nested dict from ``key = value`` lines; dotted keys become sub-dicts."""
    nested: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ContractViolation(f"{source}:{number}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ContractViolation(f"{source}:{number}: empty key")
        target = nested
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
            if not isinstance(target, dict):
                raise ContractViolation(f"{source}:{number}: '{parent}' is not a section")
        target[leaf] = value
    return nested


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_config(values: Dict[str, Any], source: str = "<config>") -> TrainConfig:
    try:
        return TrainConfig.model_validate(values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}"
            for error in exc.errors()
        )
        raise ContractViolation(f"invalid configuration in {source}: {problems}") from exc


def config_from_text(text: str, source: str = "<config>", **overrides) -> TrainConfig:
    values = _merge(parse_config_text(text, source), overrides)
    return build_config(values, source)


def load_config(path: Optional[PathLike] = None, **overrides) -> TrainConfig:
    """Config file (if any) merged with keyword overrides; None overrides are ignored."""
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if path is None:
        return build_config(overrides, "<defaults>")
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"config file not found: {path}")
    return config_from_text(path.read_text(), str(path), **overrides)
