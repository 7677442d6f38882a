"""Run configuration: TOML ingestion, validation and echo."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import tomli_w

from .model import UNBOUNDED, Capacity, ModelParams, parse_capacity

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


@dataclass(frozen=True)
class RunConfig:
    eta: float = 0.5
    mu: float = 0.0
    sigma_frac: float = 0.05
    memory_principal: Capacity = 1
    memory_agent: Capacity = 1
    timesteps: int = 20
    rounds: int = 700
    reservation_utility: float = 0.0
    base_seed: int = 0
    output_dir: str = "results"
    format: str = "csv"
    workers: Union[int, str] = "auto"
    grid_memory_principal: Tuple[Capacity, ...] = (1, 3, 5, UNBOUNDED)
    grid_memory_agent: Tuple[Capacity, ...] = (1, 3, 5, UNBOUNDED)
    grid_sigma_frac: Tuple[float, ...] = (0.05, 0.25, 0.45)

    def __post_init__(self):
        validate(self)

    def model_params(self, **overrides) -> ModelParams:
        base = dict(
            eta=self.eta, mu=self.mu, sigma_frac=self.sigma_frac,
            memory_principal=self.memory_principal, memory_agent=self.memory_agent,
            timesteps=self.timesteps, rounds=self.rounds, reservation_utility=self.reservation_utility,
        )
        base.update(overrides)
        return ModelParams(**base)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


GRID_KEYS = {"memory_principal": "grid_memory_principal", "memory_agent": "grid_memory_agent", "sigma_frac": "grid_sigma_frac"}
SCALAR_KEYS = {f.name for f in fields(RunConfig)} - set(GRID_KEYS.values())


def _number(key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(key, f"expected a finite number, got {value!r}")
    return float(value)


def _capacity(key, value):
    try:
        return parse_capacity(value)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def validate(cfg: RunConfig) -> None:
    object.__setattr__(cfg, "eta", _number("eta", cfg.eta))
    if not cfg.eta > 0:
        raise ConfigError("eta", f"must be > 0, got {cfg.eta}")
    object.__setattr__(cfg, "mu", _number("mu", cfg.mu))
    object.__setattr__(cfg, "reservation_utility", _number("reservation_utility", cfg.reservation_utility))
    object.__setattr__(cfg, "sigma_frac", _number("sigma_frac", cfg.sigma_frac))
    if cfg.sigma_frac < 0:
        raise ConfigError("sigma_frac", f"must be >= 0, got {cfg.sigma_frac}")
    for key in ("timesteps", "rounds"):
        v = _number(key, getattr(cfg, key), int)
        if v < 1:
            raise ConfigError(key, f"must be >= 1, got {v}")
        object.__setattr__(cfg, key, v)
    seed = _number("base_seed", cfg.base_seed, int)
    if seed < 0:
        raise ConfigError("base_seed", f"must be a non-negative integer, got {seed}")
    object.__setattr__(cfg, "base_seed", seed)
    object.__setattr__(cfg, "memory_principal", _capacity("memory_principal", cfg.memory_principal))
    object.__setattr__(cfg, "memory_agent", _capacity("memory_agent", cfg.memory_agent))
    if not isinstance(cfg.output_dir, (str, Path)):
        raise ConfigError("output_dir", f"expected a path, got {cfg.output_dir!r}")
    object.__setattr__(cfg, "output_dir", str(cfg.output_dir))
    if cfg.format not in FORMATS:
        raise ConfigError("format", f"must be one of {FORMATS}, got {cfg.format!r}")
    if cfg.workers != "auto":
        w = cfg.workers
        if isinstance(w, str) and w.isdigit():
            w = int(w)
        if isinstance(w, bool) or not isinstance(w, int) or w < 1:
            raise ConfigError("workers", f"must be a positive integer or 'auto', got {cfg.workers!r}")
        object.__setattr__(cfg, "workers", w)
    for key, attr in GRID_KEYS.items():
        values = getattr(cfg, attr)
        if isinstance(values, (str, int, float)) or not len(values):
            raise ConfigError(f"grid.{key}", "must be a non-empty list")
        if key == "sigma_frac":
            parsed = tuple(_number(f"grid.{key}", v) for v in values)
            if any(v < 0 for v in parsed):
                raise ConfigError(f"grid.{key}", "values must be >= 0")
        else:
            parsed = tuple(_capacity(f"grid.{key}", v) for v in values)
        object.__setattr__(cfg, attr, parsed)


def from_dict(data: Dict[str, Any]) -> RunConfig:
    kwargs = {}
    for key, value in data.items():
        if key == "grid":
            if not isinstance(value, dict):
                raise ConfigError("grid", "must be a table")
            for gkey, gval in value.items():
                if gkey not in GRID_KEYS:
                    raise ConfigError(f"grid.{gkey}", "unknown key")
                kwargs[GRID_KEYS[gkey]] = gval
        elif key == "sigma":
            raise ConfigError("sigma", "absolute noise is derived from sigma_frac and the benchmark outcome")
        elif key in SCALAR_KEYS:
            kwargs[key] = value
        else:
            raise ConfigError(key, "unknown key")
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    return from_dict(data)


def to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Plain-data echo of a config; ``load_config`` of its TOML gives ``cfg`` back."""
    out: Dict[str, Any] = {}
    for f in fields(cfg):
        if f.name in GRID_KEYS.values():
            continue
        value = getattr(cfg, f.name)
        if f.name in ("memory_principal", "memory_agent"):
            value = value if value is not UNBOUNDED else "inf"
        out[f.name] = value
    out["grid"] = {
        "memory_principal": [v if v is not UNBOUNDED else "inf" for v in cfg.grid_memory_principal],
        "memory_agent": [v if v is not UNBOUNDED else "inf" for v in cfg.grid_memory_agent],
        "sigma_frac": list(cfg.grid_sigma_frac),
    }
    return out


def dump_config(cfg: RunConfig) -> str:
    return tomli_w.dumps(to_dict(cfg))
