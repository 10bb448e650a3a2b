# services/settings.py
from __future__ import annotations

import os
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from services.errors import ConfigError

DEFAULT_CONFIG = "configs/fieldboot.yml"
DEFAULT_LOG = os.path.join("data", "runs", "fieldboot.jsonl")

_last = 0.0
_last_path = ""
_cache: dict[str, Any] = {}


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


class SynthesisDefaults(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=0.1, ge=0.0)
    bandwidth: float = Field(default=0.01, gt=0.0)
    spatial_sigma_divisor: float = Field(default=6.4, gt=0.0)
    # squared-distance level above which a pixel counts as a poor match
    poor_match_distance: float | None = Field(default=None, gt=0.0)
    sweep_bandwidths: tuple[float, ...] = (0.007, 0.01, 0.1, 1.0)


class LabDefaults(BaseModel):
    model_config = ConfigDict(frozen=True)

    bandwidth_constant: float = Field(default=0.25, gt=0.0)
    bandwidth_exponent: float = Field(default=0.25, gt=0.0)
    replicates: int = Field(default=20, ge=1)
    sizes: tuple[int, ...] = (32, 64, 128, 256)
    out_side: int = Field(default=64, ge=2)
    counterexample_size: int = Field(default=256, ge=4)
    counterexample_out_side: int = Field(default=128, ge=4)
    window_replicates: int = Field(default=5, ge=1)
    cmi_draws: int = Field(default=20000, ge=1)
    burn_in: int = Field(default=16, ge=0)
    oracle_depth: int = Field(default=12, ge=1)
    oracle_tolerance: float = Field(default=5e-3, gt=0.0)
    continuous_grid_points: int = Field(default=9, ge=2)
    max_grid_points: int = Field(default=1_000_000, ge=1)
    max_configurations: int = Field(default=1_000_000, ge=1)
    max_oracle_states: int = Field(default=1 << 22, ge=1)


class RuntimeSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_jobs: int = 1
    log_path: str = DEFAULT_LOG
    log_level: str = "WARNING"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    synthesis: SynthesisDefaults = SynthesisDefaults()
    lab: LabDefaults = LabDefaults()
    runtime: RuntimeSettings = RuntimeSettings()


def config_path() -> str:
    return os.environ.get("FIELDBOOT_CONFIG", DEFAULT_CONFIG)


def _load() -> dict[str, Any]:
    global _last, _last_path, _cache
    path = config_path()
    try:
        mtime = os.path.getmtime(path)
    except FileNotFoundError:
        return {}
    if path != _last_path or mtime > _last:
        with open(path, encoding="utf-8") as f:
            _cache = yaml.safe_load(f) or {}
        _last = mtime
        _last_path = path
    return _cache


def get_settings() -> Settings:
    """
    Settings from the YAML document, with env overrides applied on top.
    Hot-reloads when the YAML changes.
    """
    raw = dict(_load())
    runtime = dict(raw.get("runtime") or {})
    runtime["n_jobs"] = _int_env("FIELDBOOT_JOBS", int(runtime.get("n_jobs", 1)))
    runtime["log_path"] = os.environ.get("FIELDBOOT_LOG") or runtime.get("log_path", DEFAULT_LOG)
    level = os.environ.get("FIELDBOOT_LOG_LEVEL", "").strip()
    if level:
        runtime["log_level"] = level.upper()
    raw["runtime"] = runtime
    try:
        return Settings.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid settings in {config_path()}: {e}") from e
