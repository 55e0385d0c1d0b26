"""Experiment configuration: flat JSON files with strictly typed keys.

Every key is validated against the schema of the selected problem; unknown
keys are rejected (typos must not silently change an experiment).  The
system is fully deterministic, so a config determines its outputs
bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field


class ConfigError(ValueError):
    """Config file malformed, mistyped, or incomplete."""


PROBLEMS = ("advection", "burgers", "heat-semiinfinite", "navier-stokes-2d", "sphere-stokes")

# key -> (type, default); REQUIRED marks keys without a default
_REQUIRED = object()

_COMMON = {
    "problem": (str, _REQUIRED),
    "dt": (float, _REQUIRED),
    "orders": (list, [1, 2, 3]),
    "out": (str, ""),
    "oracle": (bool, True),
    "oracle_tol": (float, 1e-2),
    "output_stride": (int, 1),
    "accuracy": (int, 2),
}

_SCHEMAS = {
    "advection": {
        "n_cells": (int, 32),
        "n_steps": (int, 1),
        "x_max": (float, 1.0),
    },
    "burgers": {
        "n_cells": (int, 64),
        "n_steps": (int, _REQUIRED),
        "nu": (float, 1.0),
        "initial": (str, "constant"),   # "constant" (symmetry ends) | "sin" (periodic)
        "value": (float, 1.0),
    },
    "heat-semiinfinite": {
        "x_max": (float, 3.0),
        "n_cells": (int, 150),
        "t_end": (float, 0.1),
        "surface": (str, "constant"),   # "constant" | "ramp" (T_s = value * t)
        "surface_value": (float, 1.0),
        "flux_accuracy": (int, 4),
    },
    "navier-stokes-2d": {
        "n_cells": (int, 32),
        "n_steps": (int, _REQUIRED),
        "rho": (float, 1.0),
        "mu": (float, 1e-4),
        "lam": (float, 0.1),
        "c": (float, 1.0),
        "ic": (str, "shear"),           # "uniform" | "shear" | "taylor-green"
        "poisson_tol": (float, 1e-10),
    },
    "sphere-stokes": {
        "pe": (float, 1.0),
        "rho_max": (float, 12.0),
        "n_rho": (int, 44),
        "n_theta": (int, 20),
        "tau_end": (float, 0.03),
        "surface_rate": (float, 100.0),
    },
}


@dataclass
class ExperimentConfig:
    problem: str
    values: dict = dc_field(default_factory=dict)

    def __getattr__(self, key):
        vals = object.__getattribute__(self, "values")
        if key in vals:
            return vals[key]
        raise AttributeError(key)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def to_dict(self) -> dict:
        out = {"problem": self.problem}
        out.update(self.values)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _coerce(key: str, want, raw):
    if want is float:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"key {key!r} must be a number, got {raw!r}")
        return float(raw)
    if want is int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"key {key!r} must be an integer, got {raw!r}")
        return int(raw)
    if want is bool:
        if not isinstance(raw, bool):
            raise ConfigError(f"key {key!r} must be true/false, got {raw!r}")
        return raw
    if want is str:
        if not isinstance(raw, str):
            raise ConfigError(f"key {key!r} must be a string, got {raw!r}")
        return raw
    if want is list:
        if not isinstance(raw, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
            raise ConfigError(f"key {key!r} must be a list of integers, got {raw!r}")
        return list(raw)
    raise ConfigError(f"unhandled type for key {key!r}")


def validate(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a flat JSON object")
    problem = raw.get("problem")
    if problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}, got {problem!r}")
    schema = dict(_COMMON)
    schema.update(_SCHEMAS[problem])
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values = {}
    for key, (want, default) in schema.items():
        if key == "problem":
            continue
        if key in raw:
            values[key] = _coerce(key, want, raw[key])
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r} for problem {problem!r}")
        else:
            values[key] = default
    cfg = ExperimentConfig(problem, values)
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg: ExperimentConfig) -> None:
    if cfg.dt <= 0:
        raise ConfigError("dt must be positive")
    if not cfg.orders or any(q < 1 for q in cfg.orders):
        raise ConfigError("orders must be positive integers")
    if cfg.accuracy < 2 or cfg.accuracy % 2:
        raise ConfigError("accuracy must be an even integer >= 2")
    if cfg.problem == "burgers" and cfg.initial not in ("constant", "sin"):
        raise ConfigError("burgers initial must be 'constant' or 'sin'")
    if cfg.problem == "navier-stokes-2d" and cfg.ic not in ("uniform", "shear", "taylor-green"):
        raise ConfigError("navier-stokes-2d ic must be 'uniform', 'shear' or 'taylor-green'")
    if cfg.problem == "heat-semiinfinite":
        n = cfg.t_end / cfg.dt
        if abs(n - round(n)) > 1e-9:
            raise ConfigError("dt must divide t_end")
        if cfg.surface not in ("constant", "ramp"):
            raise ConfigError("heat surface must be 'constant' or 'ramp'")
    if cfg.problem == "sphere-stokes":
        n = cfg.tau_end / cfg.dt
        if abs(n - round(n)) > 1e-9:
            raise ConfigError("dt must divide tau_end")
        if cfg.rho_max <= 1.0:
            raise ConfigError("rho_max must exceed 1")


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    return validate(raw)


def loads_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return validate(raw)
