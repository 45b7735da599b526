"""The run configuration schema: one JSON object covering engine + k sampling.

The same parser backs the CLI config file and the in-process bindings, so
both surfaces validate identically and emit the same diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .corpus import FORMAT_TAGS
from .engine import EngineConfig, StrategyWeights
from .errors import ConfigError
from .ksampler import KDistribution

_TOP_KEYS = {
    "seed", "epochs", "budget", "length_counter", "strategy_weights",
    "primary_mode", "wrap_probability", "grouping", "k_distribution",
    "registry", "input_format",
}

_PARAM_FIELDS = {"lambda": "lam", "mu": "mu", "sigma": "sigma",
                 "s": "s", "m": "m", "alpha": "alpha"}


@dataclass(frozen=True)
class RunConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    k_dist: KDistribution = field(default_factory=KDistribution)
    registry_path: str | None = None
    input_format: str = "alpaca-triplet"


def _expect(mapping: Mapping, key: str, kind, default):
    value = mapping.get(key, default)
    if isinstance(kind, tuple):
        ok = isinstance(value, kind) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind) and not (kind is int and isinstance(value, bool))
    if not ok:
        raise ConfigError(f"config key {key!r} has invalid type {type(value).__name__}")
    return value


def parse_config(raw: Mapping) -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    weights_raw = raw.get("strategy_weights", {})
    if not isinstance(weights_raw, Mapping):
        raise ConfigError("config key 'strategy_weights' must be an object")
    unknown_w = set(weights_raw) - {"format", "permute", "maskout"}
    if unknown_w:
        raise ConfigError(f"strategy_weights: unknown keys {sorted(unknown_w)}")
    defaults = StrategyWeights()
    weights = StrategyWeights(
        format=float(weights_raw.get("format", defaults.format)),
        permute=float(weights_raw.get("permute", defaults.permute)),
        maskout=float(weights_raw.get("maskout", defaults.maskout)),
    )

    engine = EngineConfig(
        seed=_expect(raw, "seed", int, 0),
        epochs=_expect(raw, "epochs", int, 1),
        budget=_expect(raw, "budget", int, 1400),
        length_counter=_expect(raw, "length_counter", str, "whitespace_words"),
        strategy_weights=weights,
        primary_mode=_expect(raw, "primary_mode", bool, False),
        wrap_probability=float(_expect(raw, "wrap_probability", (int, float), 1.0)),
        grouping=_expect(raw, "grouping", str, "random"),
    )

    kd_raw = raw.get("k_distribution", {})
    if not isinstance(kd_raw, Mapping):
        raise ConfigError("config key 'k_distribution' must be an object")
    unknown_k = set(kd_raw) - {"family", "k_max", "params"}
    if unknown_k:
        raise ConfigError(f"k_distribution: unknown keys {sorted(unknown_k)}")
    params_raw = kd_raw.get("params", {})
    if not isinstance(params_raw, Mapping):
        raise ConfigError("k_distribution.params must be an object")
    unknown_p = set(params_raw) - set(_PARAM_FIELDS)
    if unknown_p:
        raise ConfigError(f"k_distribution.params: unknown keys {sorted(unknown_p)}")
    kd_kwargs = {}
    for key, field_name in _PARAM_FIELDS.items():
        if key in params_raw:
            value = params_raw[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"k_distribution.params.{key} must be a number")
            kd_kwargs[field_name] = float(value)
    k_dist = KDistribution(
        family=_expect(kd_raw, "family", str, "uniform"),
        k_max=_expect(kd_raw, "k_max", int, 10),
        **kd_kwargs,
    )

    registry_path = raw.get("registry")
    if registry_path is not None and not isinstance(registry_path, str):
        raise ConfigError("config key 'registry' must be a path string")

    input_format = _expect(raw, "input_format", str, "alpaca-triplet")
    if input_format not in FORMAT_TAGS:
        raise ConfigError(f"input_format must be one of {FORMAT_TAGS}, got {input_format!r}")

    return RunConfig(engine=engine, k_dist=k_dist,
                     registry_path=registry_path, input_format=input_format)


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return raw
