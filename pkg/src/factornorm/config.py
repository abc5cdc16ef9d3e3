"""Experiment configuration: loading, defaults and validation."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXPERIMENTS = ("gamma2-table", "symbol-growth", "bound-verify", "kernel-factor",
               "factor-demo", "fejer-demo", "consistency-suite")

DEFAULT_TOLERANCES = {
    "sdp": 1e-6,         # bracket width for gamma_2 and gamma_2^*
    "bound": 1e-4,       # slack allowed in lhs <= rhs + tol
    "hille_phillips": 1e-10,
    "homomorphism": 1e-8,
    "shift": 2e-8,
    "laplace": 1e-12,
    "poisson": 1e-6,
    "plancherel": 1e-8,
    "riesz": 1e-8,
    "norm": 1e-6,
    "isometry": 1e-5,
    "product": 1e-10,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    catalog: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def tol(self, key):
        return self.tolerances[key]

    @property
    def name(self):
        return self.output.get("name", self.experiment)


def _read(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def parse_config(data):
    """Validate a mapping and return an :class:`ExperimentConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a table")
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    tols = dict(DEFAULT_TOLERANCES)
    for k, v in data.get("tolerances", {}).items():
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {k!r}")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not (v > 0) \
                or not math.isfinite(v):
            raise ConfigError(f"tolerance {k!r} must be a positive number")
        tols[k] = float(v)
    for section in ("params", "catalog", "output"):
        if not isinstance(data.get(section, {}), dict):
            raise ConfigError(f"[{section}] must be a table")
    return ExperimentConfig(exp, seed, tols, dict(data.get("params", {})),
                            dict(data.get("catalog", {})), dict(data.get("output", {})), data)


def load_config(path):
    return parse_config(_read(path))
