"""Flat experiment configuration.

A config file is a flat YAML mapping whose keys are the field names of
:class:`ExperimentConfig`, e.g.::

    n_sites: 80
    p1: 0.8
    p2: 20
    target_mode: 15
    sweep_p1: "0.1:1.3:6:log"
    sweep_p2: "0.5:24:6:log"

Every key can also be given on the command line as ``--<key> <value>``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .core import DimensionlessParams, InvalidParameterError, crossing_time
from .modes import EfficiencyWindow
from .sites import Boundary, DriveKind, IntegratorConfig

__all__ = ["ConfigError", "ExperimentConfig", "SweepAxis", "load_config", "parse_axis"]

ENGINES = ("modes", "sites")
FORMATS = ("csv", "json")
SWEEPABLE = ("p1", "p2", "p3")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "lin"

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


def parse_axis(name: str, spec: str) -> SweepAxis:
    """``"min:max:count[:lin|log]"`` -> :class:`SweepAxis`."""
    if name not in SWEEPABLE:
        raise ConfigError(f"cannot sweep unknown parameter {name!r}")
    parts = str(spec).split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"axis spec for {name} must be min:max:count[:lin|log], got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad axis spec {spec!r}: {exc}") from None
    scale = parts[3] if len(parts) == 4 else "lin"
    if scale not in ("lin", "log"):
        raise ConfigError(f"axis scale must be lin or log, got {scale!r}")
    if count < 1:
        raise ConfigError("axis count must be >= 1")
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise ConfigError("log axes need positive bounds")
    return SweepAxis(name, lo, hi, count, scale)


@dataclass(frozen=True)
class ExperimentConfig:
    # model
    n_sites: int = 80
    p1: float = 0.8
    p2: float = 20.0
    p3: float = 0.0
    boundary: str = "periodic"
    drive: str = "traveling"
    engine: str = "modes"
    # run
    tau_final: float | None = None
    target_mode: int | None = None
    tau_start: float = 0.0
    sample_every: float | None = None
    rtol: float = 1e-9
    atol: float = 1e-12
    max_step: float = math.inf
    # sweep
    sweep_p1: str | None = None
    sweep_p2: str | None = None
    sweep_p3: str | None = None
    resume: bool = False
    # efficiency window
    window_lo: int | None = None
    window_hi: int | None = None
    # threshold bisection
    threshold_lo: float = 0.01
    threshold_hi: float = 1.0
    threshold_target: float = 0.5
    threshold_tol: float = 1e-3
    # boundary curves
    boundary_p1_min: float = 0.1
    boundary_p1_max: float = 1.3
    boundary_p1_count: int = 50
    ladder_r: int = 10
    # ray ensembles
    ray_count: int = 16
    ray_rule: str = "stable"
    ray_spread: float = 0.05
    ray_k_init: float = 0.0
    ray_k_final: float = math.pi / 6
    # output
    out: str = "out"
    format: str = "csv"
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.boundary not in {b.value for b in Boundary}:
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if self.drive not in {d.value for d in DriveKind}:
            raise ConfigError(f"unknown drive {self.drive!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.ray_rule not in ("stable", "uniform"):
            raise ConfigError("ray_rule must be stable or uniform")
        if self.ray_count < 0:
            raise ConfigError("ray_count must be >= 0")
        if self.sample_every is not None and not self.sample_every > 0:
            raise ConfigError("sample_every must be positive")
        self.params()  # validates p1..p3, n_sites
        self.axes()

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def params(self) -> DimensionlessParams:
        try:
            return DimensionlessParams(self.p1, self.p2, self.p3, self.n_sites)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None

    def axes(self) -> list[SweepAxis]:
        out = []
        for name in SWEEPABLE:
            spec = getattr(self, f"sweep_{name}")
            if spec:
                out.append(parse_axis(name, spec))
        return out

    def resolved_target_mode(self) -> int:
        if self.target_mode is not None:
            return int(self.target_mode)
        return max(1, round(3 * self.n_sites / 16))  # 15 for N = 80

    def resolved_tau_final(self, params: DimensionlessParams | None = None) -> float:
        params = params or self.params()
        if self.tau_final is not None:
            tau_f = float(self.tau_final)
        else:
            l = self.resolved_target_mode()
            if not 1 <= l <= params.n_sites - 1:
                raise ConfigError(f"target_mode {l} outside [1, {params.n_sites - 1}]")
            tau_f = crossing_time(l, params)
        if not tau_f > self.tau_start:
            raise ConfigError(f"tau_final ({tau_f}) must exceed tau_start ({self.tau_start})")
        return tau_f

    def window(self) -> EfficiencyWindow:
        default = EfficiencyWindow.default(self.n_sites)
        lo = self.window_lo if self.window_lo is not None else default.lo_mode
        hi = self.window_hi if self.window_hi is not None else default.hi_mode
        try:
            return EfficiencyWindow(int(lo), int(hi), self.n_sites)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def integrator(self, tau_span: float) -> IntegratorConfig:
        every = self.sample_every if self.sample_every is not None else tau_span / 200
        return IntegratorConfig(self.rtol, self.atol, self.max_step, every)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def _coerce(field: dataclasses.Field, value):
    if value is None:
        return None
    kind = str(field.type)
    try:
        if kind.startswith("bool"):
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes", "on"):
                    return True
                if value.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        if kind.startswith("int"):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind.startswith("float"):
            return float(value)
        if kind.startswith("str"):
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {field.name}: {value!r}") from None
    return value


def load_config(path=None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Build a config from an optional YAML file plus explicit overrides."""
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("config file must be a flat key/value mapping")
        raw.update(data)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name: f for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config key {key} must be a scalar")
        kwargs[key] = _coerce(known[key], value)
    try:
        return ExperimentConfig(**kwargs)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None
