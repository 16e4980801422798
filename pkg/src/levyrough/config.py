"""Run configuration: nested dataclasses loaded from JSON/YAML, overridden by flags.

Unknown keys and out-of-range values raise :class:`ConfigError`.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import yaml

from .fields import VectorField, from_preset
from .levy import LevyMeasureSpec, LevyModel, rng_stream

COMMANDS = ("simulate", "solve", "area", "pvar", "verify")
MODES = ("geometric", "forward", "corrective")
FIELD_PRESETS = ("constant", "linear", "linear-truncated", "rotation", "trig", "tabulated")


class ConfigError(ValueError):
    pass


@dataclass
class ModelConfig:
    kind: str = "brownian"  # brownian | levy
    dimension: int = 2
    drift: list | None = None
    covariance: list | None = None
    measure: dict | None = None  # {"kind": ..., **params}
    horizon: float = 1.0
    grid_points: int = 1025
    eps: float = 1e-3


@dataclass
class FieldConfig:
    preset: str = "linear-truncated"
    state_dim: int = 2
    params: dict = dc_field(default_factory=dict)
    initial: list | None = None  # defaults to ones


@dataclass
class NumericConfig:
    p: float = 1.5
    q: float | None = None
    delta: float = 1.0
    tol: float = 1e-10
    max_iter: int = 50
    max_level: int = 10
    trials: int = 1000
    mode: str = "geometric"
    n_corrections: int = 0
    s: float = 0.0
    t: float = 1.0
    area_stride: int = 16


@dataclass
class OutputConfig:
    directory: str = "out"
    format: str = "csv"  # csv | json


@dataclass
class RunConfig:
    command: str = "simulate"
    seed: int | None = None
    input: str | None = None
    suite: str | None = None
    quick: bool = False
    model: ModelConfig = dc_field(default_factory=ModelConfig)
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    numeric: NumericConfig = dc_field(default_factory=NumericConfig)
    output: OutputConfig = dc_field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    # ---------------------------------------------------------- validation
    def validate(self) -> "RunConfig":
        c, m, n = self.command, self.model, self.numeric
        if c not in COMMANDS:
            raise ConfigError(f"unknown command {c!r}")
        if m.kind not in ("brownian", "levy"):
            raise ConfigError(f"model.kind must be brownian or levy, got {m.kind!r}")
        if m.dimension < 1 or m.grid_points < 2 or m.horizon <= 0 or not 0 < m.eps <= 1:
            raise ConfigError("model needs dimension >= 1, grid_points >= 2, horizon > 0, eps in (0, 1]")
        if not 1 <= n.p < 3:
            raise ConfigError("numeric.p must lie in [1, 3)")
        if n.q is not None and n.q < 1:
            raise ConfigError("numeric.q must be >= 1")
        if n.delta <= 0 or n.tol <= 0 or n.max_iter < 1 or n.trials < 2 or n.area_stride < 1:
            raise ConfigError("numeric: delta, tol > 0; max_iter >= 1; trials >= 2; area_stride >= 1")
        if not 1 <= n.max_level <= 24:
            raise ConfigError("numeric.max_level must lie in [1, 24]")
        if n.mode not in MODES:
            raise ConfigError(f"numeric.mode must be one of {MODES}")
        if n.n_corrections < 0:
            raise ConfigError("numeric.n_corrections must be >= 0")
        if not 0 <= n.s < n.t:
            raise ConfigError("need 0 <= numeric.s < numeric.t")
        if self.field.preset not in FIELD_PRESETS:
            raise ConfigError(f"field.preset must be one of {FIELD_PRESETS}")
        if self.output.format not in ("csv", "json"):
            raise ConfigError("output.format must be csv or json")
        stochastic = c in ("simulate", "area", "verify") or (c in ("solve", "pvar") and self.input is None)
        if stochastic and self.seed is None:
            raise ConfigError(f"{c} needs an explicit seed")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if c == "verify" and not self.suite:
            raise ConfigError("verify needs a suite name")
        return self

    # ----------------------------------------------------------- builders
    def build_model(self) -> LevyModel:
        m = self.model
        d = m.dimension
        try:
            if m.kind == "brownian":
                if m.measure:
                    raise ConfigError("a brownian model takes no measure")
                cov = np.eye(d) if m.covariance is None else np.asarray(m.covariance, dtype=float)
                return LevyModel(np.zeros(d) if m.drift is None else m.drift, cov, LevyMeasureSpec.zero(d))
            meas = dict(m.measure or {"kind": "zero"})
            kind = meas.pop("kind")
            spec = LevyMeasureSpec(kind, d, meas)
            drift = np.zeros(d) if m.drift is None else m.drift
            cov = np.zeros((d, d)) if m.covariance is None else m.covariance
            return LevyModel(drift, cov, spec)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid model: {exc}") from exc

    def build_field(self, driver_dim: int) -> VectorField:
        f = self.field
        try:
            return from_preset(f.preset, f.state_dim, driver_dim, f.params, rng_stream(self.seed or 0, 0xF1E1D))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid field: {exc}") from exc

    def initial(self) -> np.ndarray:
        a = np.ones(self.field.state_dim) if self.field.initial is None else np.asarray(self.field.initial, float)
        if a.shape != (self.field.state_dim,):
            raise ConfigError("field.initial must have length field.state_dim")
        return a


def _merge(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a mapping")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"unknown keys in {where or 'config'}: {unknown}")
    kwargs = {}
    for k, v in data.items():
        sub = names[k].default_factory if names[k].default_factory is not dataclasses.MISSING else None
        if sub is not None and dataclasses.is_dataclass(sub):
            kwargs[k] = _merge(sub, v, f"{where}.{k}" if where else k)
        else:
            kwargs[k] = v
    return cls(**kwargs)


def from_dict(data: dict) -> RunConfig:
    return _merge(RunConfig, data, "")


def load_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return {} if data is None else data


def set_path(data: dict, dotted: str, value) -> None:
    """``set_path(d, "numeric.p", 2.5)`` creating intermediate mappings."""
    keys = dotted.split(".")
    for k in keys[:-1]:
        data = data.setdefault(k, {})
    data[keys[-1]] = value
