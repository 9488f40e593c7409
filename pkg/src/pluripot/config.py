"""Run configuration: plain-text key=value file, environment overrides with
the PLURIPOT_ prefix, then command-line flags, in increasing precedence.
Every randomized suite draws from a Philox counter-based stream derived from
the master seed and the suite's registry index, so results are reproducible
and independent of execution order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

import numpy as np

ENV_PREFIX = "PLURIPOT_"


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    strip_s: float = 0.9
    fd_step: float = 1e-3
    mc_budget: int = 1_000_000
    seed: int = 20260808
    tol_scale: float = 1.0
    jobs: int = 2

    def rng_for(self, stream_index: int) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(stream_index,))
        return np.random.Generator(np.random.Philox(seq))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {"n": int, "strip_s": float, "fd_step": float, "mc_budget": int,
                "seed": int, "tol_scale": float, "jobs": int}


def _coerce(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise KeyError(f"unknown config key {key!r}")
    try:
        return _FIELD_TYPES[key](raw.strip())
    except ValueError as exc:
        raise ValueError(f"bad value for {key!r}: {raw!r}") from exc


def parse_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = line.split("=", 1)
            values[key.strip()] = _coerce(key.strip(), raw)
    return values


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    values = {}
    for key in _FIELD_TYPES:
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _coerce(key, raw)
    return values


def load_config(path: str | None = None, overrides: dict | None = None,
                environ=None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg = replace(cfg, **parse_config_file(path))
    cfg = replace(cfg, **env_overrides(environ))
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg


__all__ = ["RunConfig", "load_config", "parse_config_file", "env_overrides", "ENV_PREFIX"]
