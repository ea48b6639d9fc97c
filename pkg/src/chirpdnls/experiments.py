"""Experiment runners shared by the CLI and the scripts.

Each runner takes an :class:`ExperimentConfig` and returns plain results;
writing files is left to :mod:`chirpdnls.cli`.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig
from .core import LINEAR_CHIRP
from .integrate import StiffnessError
from .modes import (
    Ladder,
    ModeState,
    ModeTrajectory,
    efficiency,
    ground_modes,
    integrate_modes,
    periodic_ladder,
    site_to_modes,
    zero_ladder,
)
from .rays import EnsembleResult, run_ensemble
from .regimes import (
    RegimeLabel,
    bisect_threshold,
    boundary_curves,
    classify,
)
from .sites import Boundary, DriveKind, ground_state, integrate

__all__ = [
    "RunResult",
    "SweepRow",
    "ThresholdResult",
    "run_single",
    "sweep_points",
    "run_sweep",
    "run_threshold",
    "run_boundaries",
    "run_rays",
    "rays_tau_final",
    "read_sweep_csv",
    "write_sweep_csv",
    "write_separatrix_csv",
]


@dataclass
class RunResult:
    config: ExperimentConfig
    tau_final: float
    trajectory: ModeTrajectory  # rotating-frame populations for either engine
    efficiency: float
    regime: str
    norm_drift: float
    wall_ms: float
    site_trajectory: object = None  # SiteTrajectory when the site engine ran

    @property
    def final(self) -> ModeState:
        return self.trajectory.final

    @property
    def ladder(self) -> Ladder:
        return self.trajectory.ladder

    def summary(self) -> dict:
        p = self.config.params()
        return {
            "params": {"p1": p.p1, "p2": p.p2, "p3": p.p3, "n_sites": p.n_sites,
                       "boundary": self.config.boundary, "drive": self.config.drive,
                       "engine": self.config.engine},
            "tau_final": self.tau_final,
            "efficiency": self.efficiency,
            "regime": self.regime,
            "norm_drift": self.norm_drift,
            "wall_ms": self.wall_ms,
            "seed": self.config.seed,
        }


def _regime(cfg: ExperimentConfig, tau_f: float) -> str:
    if cfg.boundary != Boundary.PERIODIC.value or cfg.n_sites < 4:
        return "n/a"
    return RegimeLabel(classify(cfg.params(), tau_f)).value


def run_single(cfg: ExperimentConfig, with_regime: bool = True) -> RunResult:
    """Integrate from the ground state at ``tau_start`` to the resolved final time."""
    params = cfg.params()
    tau_f = cfg.resolved_tau_final(params)
    window = cfg.window()
    icfg = cfg.integrator(tau_f - cfg.tau_start)
    bc, dk = Boundary(cfg.boundary), DriveKind(cfg.drive)
    ladder = periodic_ladder(params) if bc is Boundary.PERIODIC else zero_ladder(params)
    start = time.perf_counter()
    site_traj = None
    if cfg.engine == "modes":
        traj = integrate_modes(ground_modes(ladder, cfg.tau_start), ladder, LINEAR_CHIRP,
                               icfg, tau_f)
        drift = float(np.max(np.abs(traj.norms() - 1.0)))
    else:
        s0 = ground_state(params, bc)
        s0 = type(s0)(s0.amplitudes, cfg.tau_start)
        site_traj = integrate(s0, params, LINEAR_CHIRP, bc, dk, icfg, tau_f)
        amps = np.array([site_to_modes(s, params, LINEAR_CHIRP, bc=bc).amplitudes
                         for s in site_traj.states()])
        traj = ModeTrajectory(site_traj.tau, amps, ladder, site_traj.n_steps)
        drift = float(np.max(np.abs(site_traj.norms() - 1.0)))
    wall_ms = 1e3 * (time.perf_counter() - start)
    if not np.all(np.isfinite(traj.amplitudes)):
        raise FloatingPointError("non-finite amplitudes")
    eff = efficiency(traj.final, window, ladder)
    regime = _regime(cfg, tau_f) if with_regime else "n/a"
    return RunResult(cfg, tau_f, traj, eff, regime, drift, wall_ms, site_traj)


# sweeps

@dataclass
class SweepRow:
    p1: float
    p2: float
    p3: float
    efficiency: float = math.nan
    regime: str = ""
    norm_drift: float = math.nan
    error: str = ""

    def key(self) -> tuple[str, str, str]:
        return (repr(float(self.p1)), repr(float(self.p2)), repr(float(self.p3)))

    def as_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "p3": self.p3, "efficiency": self.efficiency,
                "regime": self.regime, "norm_drift": self.norm_drift, "error": self.error}


SWEEP_COLUMNS = ["p1", "p2", "p3", "efficiency", "regime", "norm_drift", "error"]


def sweep_points(cfg: ExperimentConfig) -> list[tuple[float, float, float]]:
    """Grid of (p1, p2, p3), p1 varying slowest; unswept parameters stay fixed."""
    values = {"p1": [cfg.p1], "p2": [cfg.p2], "p3": [cfg.p3]}
    for axis in cfg.axes():
        values[axis.name] = [float(v) for v in axis.values()]
    return list(itertools.product(values["p1"], values["p2"], values["p3"]))


def _sweep_point(cfg: ExperimentConfig, point) -> SweepRow:
    p1, p2, p3 = point
    row = SweepRow(p1, p2, p3)
    try:
        res = run_single(cfg.replace(p1=p1, p2=p2, p3=p3, sweep_p1=None, sweep_p2=None,
                                     sweep_p3=None))
        row.efficiency, row.regime, row.norm_drift = res.efficiency, res.regime, res.norm_drift
    except (StiffnessError, FloatingPointError, ConfigError, ValueError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def read_sweep_csv(path) -> dict[tuple[str, str, str], SweepRow]:
    rows = {}
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            row = SweepRow(float(rec["p1"]), float(rec["p2"]), float(rec["p3"]),
                           float(rec["efficiency"]), rec["regime"], float(rec["norm_drift"]),
                           rec["error"])
            rows[row.key()] = row
    return rows


def run_sweep(cfg: ExperimentConfig, previous: dict | None = None, jobs: int | None = None
              ) -> list[SweepRow]:
    """Evaluate every grid point, reusing finished rows from ``previous``.

    Rows come back in grid order regardless of ``jobs``; a point that fails
    numerically is kept with NaN efficiency and the error message.
    """
    points = sweep_points(cfg)
    previous = previous or {}
    rows: list[SweepRow | None] = [None] * len(points)
    todo = []
    for i, pt in enumerate(points):
        old = previous.get(SweepRow(*pt).key())
        if old is not None and not old.error:
            rows[i] = old
        else:
            todo.append(i)
    jobs = jobs or cfg.jobs
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = pool.map(_sweep_point, itertools.repeat(cfg), [points[i] for i in todo])
            for i, row in zip(todo, done):
                rows[i] = row
    else:
        for i in todo:
            rows[i] = _sweep_point(cfg, points[i])
    return rows  # type: ignore[return-value]


def write_sweep_csv(rows: list[SweepRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([repr(float(r.p1)), repr(float(r.p2)), repr(float(r.p3)),
                        repr(float(r.efficiency)), r.regime, repr(float(r.norm_drift)), r.error])
    return path


# threshold

@dataclass
class ThresholdResult:
    p1_threshold: float
    evaluations: list[tuple[float, float]] = field(default_factory=list)


def run_threshold(cfg: ExperimentConfig) -> ThresholdResult:
    """Bisect p1 for the efficiency crossing ``threshold_target``."""

    def measure(p1):
        return run_single(cfg.replace(p1=p1), with_regime=False).efficiency

    x, evals = bisect_threshold(measure, cfg.threshold_lo, cfg.threshold_hi,
                                cfg.threshold_target, cfg.threshold_tol)
    return ThresholdResult(x, evals)


# boundaries

def run_boundaries(cfg: ExperimentConfig) -> dict[str, list[tuple[float, float]]]:
    p1_values = np.geomspace(cfg.boundary_p1_min, cfg.boundary_p1_max, cfg.boundary_p1_count)
    return boundary_curves(p1_values, cfg.p3, cfg.n_sites, cfg.ladder_r,
                           cfg.resolved_target_mode())


def write_separatrix_csv(points, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p1", "p2_boundary"])
        for p1, p2 in points:
            w.writerow([repr(float(p1)), repr(float(p2))])
    return path


# rays

def rays_tau_final(cfg: ExperimentConfig) -> float:
    """Explicit ``tau_final``, else the time the resonance reaches ``ray_k_final``."""
    if cfg.tau_final is not None:
        return float(cfg.tau_final)
    p = cfg.params()
    return p.p2 * p.n_sites * math.sin(cfg.ray_k_final) / math.pi


def run_rays(cfg: ExperimentConfig) -> EnsembleResult:
    tau_f = rays_tau_final(cfg)
    if not tau_f > 0:
        raise ConfigError("ray ensembles need a positive final time")
    return run_ensemble(cfg.params(), cfg.ray_count, tau_f, cfg.ray_rule, cfg.ray_spread,
                        cfg.ray_k_init, cfg.seed)
