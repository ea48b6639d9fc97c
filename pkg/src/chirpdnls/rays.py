"""Semiclassical (eikonal) description of the continuum limit.

Local dispersion along a ray::

    Omega(x, k, tau) = (p2 N^2/pi^2) sin^2(k/2) - 2 p1 cos(k0 x - theta_d)

With Phi = k0 x - theta_d the ray equations collapse to the phase-locking
pair

    dPhi/dtau = p2 (N/pi) sin k - omega_d,    dk/dtau = -p1 (4 pi/N) sin Phi

i.e. a tilted pendulum ``Phi'' = -4 p1 p2 cos(k) sin(Phi) - 1`` whose
separatrix decides capture into autoresonance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .core import LINEAR_CHIRP, DimensionlessParams, DriveSchedule, crossing_time
from .integrate import dopri5

__all__ = [
    "ResonanceLost",
    "EdgeOutOfBand",
    "RayState",
    "PendulumState",
    "ReducedTrajectory",
    "SeparatrixGeometry",
    "EnsembleResult",
    "wrap_k",
    "omega_local",
    "ray_rhs",
    "integrate_rays",
    "reduced_rhs",
    "integrate_reduced",
    "k_resonant",
    "stable_phase",
    "detect_capture",
    "separatrix_radicand",
    "separatrix_geometry",
    "k_lower_edge",
    "separatrix_boundary",
    "run_ensemble",
    "write_ensemble_csv",
]


class ResonanceLost(ValueError):
    """The drive frequency has left the linear band; no resonant k exists."""


class EdgeOutOfBand(ValueError):
    """The lower separatrix edge maps outside ``sin k in [-1, 1]``."""


def wrap_k(k):
    """Map wavenumbers into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(k, dtype=float), 2 * np.pi)


@dataclass(frozen=True)
class RayState:
    x: float
    k: float
    s: float = 0.0
    omega_loc: float = math.nan
    b_amp: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "k", float(wrap_k(self.k)))


@dataclass(frozen=True)
class PendulumState:
    phi: float
    phi_dot: float


def _group(params):
    return params.band_scale / 2  # d Omega / dk = (p2 N^2 / 2 pi^2) sin k


def omega_local(x, k, tau, params: DimensionlessParams, drive: DriveSchedule = LINEAR_CHIRP):
    phase = params.k0 * np.asarray(x) - drive.theta_d(tau)
    return params.band_scale * np.sin(np.asarray(k) / 2) ** 2 - 2 * params.p1 * np.cos(phase)


def ray_rhs(r: RayState | np.ndarray, tau: float, params: DimensionlessParams,
            drive: DriveSchedule = LINEAR_CHIRP) -> np.ndarray:
    """Derivatives of ``(x, k, Omega, S)`` along a ray; Omega acts as the Hamiltonian.

    Accepts a :class:`RayState` or an array whose leading axis is ``(x, k, Omega, S)``.
    """
    if isinstance(r, RayState):
        x, k = r.x, r.k
    else:
        x, k = r[0], r[1]
    phase = params.k0 * x - drive.theta_d(tau)
    om = omega_local(x, k, tau, params, drive)
    dom_dk = _group(params) * np.sin(k)
    dom_dx = 2 * params.p1 * params.k0 * np.sin(phase)
    dom_dt = -2 * params.p1 * drive.omega_d(tau) * np.sin(phase)
    return np.array([dom_dk, -dom_dx, dom_dt, -om + k * dom_dk])


def integrate_rays(x0, k0, params: DimensionlessParams, tau0: float, tau_end: float,
                   drive: DriveSchedule = LINEAR_CHIRP, samples=None, rtol=1e-10, atol=1e-12):
    """Integrate a bundle of rays; returns (tau, x, k, Omega, S) arrays of shape (samples, rays)."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    k0 = np.broadcast_to(np.asarray(k0, dtype=float), x0.shape)
    m = x0.size
    y0 = np.concatenate([x0, k0, omega_local(x0, k0, tau0, params, drive), np.zeros(m)])

    def rhs(tau, y):
        return ray_rhs(y.reshape(4, m), tau, params, drive).reshape(-1)

    sol = dopri5(rhs, y0, tau0, tau_end, sample_times=samples, rtol=rtol, atol=atol)
    ys = sol.y.reshape(sol.t.size, 4, m)
    return sol.t, ys[:, 0], ys[:, 1], ys[:, 2], ys[:, 3]


def reduced_rhs(phi, k, tau, params: DimensionlessParams, drive: DriveSchedule = LINEAR_CHIRP,
                b2_gradient=0.0):
    """Phase-locking pair ``(dPhi/dtau, dk/dtau)``.

    ``b2_gradient`` is d(b^2)/dx entering the Kerr correction to dk/dtau; with
    the slow amplitude treated as uniform it is zero.
    """
    n = params.n_sites
    dphi = params.p2 * (n / math.pi) * np.sin(k) - drive.omega_d(tau)
    dk = -params.p1 * (4 * math.pi / n) * np.sin(phi) + n * params.p3 * np.asarray(b2_gradient)
    return dphi, dk


@dataclass
class ReducedTrajectory:
    tau: np.ndarray  # (samples,)
    phi: np.ndarray  # (samples, rays)
    k: np.ndarray  # (samples, rays)
    params: DimensionlessParams


def integrate_reduced(phi0, k0, params: DimensionlessParams, tau0: float = 0.0,
                      tau_end: float = 1.0, drive: DriveSchedule = LINEAR_CHIRP,
                      n_samples: int = 401, rtol=1e-9, atol=1e-11) -> ReducedTrajectory:
    """Evolve an ensemble of ``(Phi, k)`` points together."""
    phi0 = np.atleast_1d(np.asarray(phi0, dtype=float))
    k0 = np.broadcast_to(np.asarray(k0, dtype=float), phi0.shape).copy()
    m = phi0.size

    def rhs(tau, y):
        dphi, dk = reduced_rhs(y[:m], y[m:], tau, params, drive)
        return np.concatenate([dphi, dk])

    grid = np.linspace(tau0, tau_end, n_samples)
    sol = dopri5(rhs, np.concatenate([phi0, k0]), tau0, tau_end, sample_times=grid,
                 rtol=rtol, atol=atol)
    return ReducedTrajectory(sol.t, sol.y[:, :m], sol.y[:, m:], params)


def k_resonant(tau, params: DimensionlessParams) -> float:
    """Wavenumber with ``p2 (N/pi) sin k = tau``."""
    arg = math.pi * tau / (params.p2 * params.n_sites)
    if arg > 1 or arg < 0:
        raise ResonanceLost(f"drive frequency {tau:g} outside the resonant band")
    return math.asin(arg)


def stable_phase(params: DimensionlessParams, tau: float = 0.0) -> float:
    """Bottom of the tilted-pendulum well, or -pi/2 (the flattest point) if none exists."""
    amp = 4 * params.p1 * params.p2 * math.cos(k_resonant(tau, params))
    if amp <= 1:
        return -math.pi / 2
    return -math.asin(1 / amp)


def detect_capture(traj: ReducedTrajectory, k_tol: float = 0.2) -> np.ndarray:
    """Per-ray phase-locking flag judged over the final quarter of the run."""
    tau = traj.tau
    sel = tau >= tau[0] + 0.75 * (tau[-1] - tau[0])
    n = traj.params.n_sites
    arg = np.clip(math.pi * tau[sel] / (traj.params.p2 * n), -1, 1)
    kr = np.arcsin(arg)[:, None]
    phi = traj.phi[sel]
    bounded = (phi.max(axis=0) - phi.min(axis=0)) < 2 * math.pi
    tracking = np.max(np.abs(traj.k[sel] - kr), axis=0) < k_tol
    return bounded & tracking


def separatrix_radicand(phi, b_param):
    return b_param * (1 - np.cos(phi)) + np.sin(phi) - phi


@dataclass(frozen=True)
class SeparatrixGeometry:
    b_param: float
    k_r: float
    phi_turn: float
    phi_deepest: float
    min_branch_velocity: float
    k_lower_edge: float  # nan when the edge maps out of band


def separatrix_geometry(params: DimensionlessParams, tau: float) -> SeparatrixGeometry | None:
    """Size of the trapping region of the tilted pendulum at time ``tau``.

    Phase is measured from the potential maximum, so the trapped loop spans
    ``0 <= Phi <= phi_turn``. Returns None when no separatrix exists.
    """
    kr = k_resonant(tau, params)
    amp = 4 * math.cos(kr) * params.p1 * params.p2
    if amp < 1:
        return None
    b = math.sqrt(max(amp * amp - 1, 0.0))
    # radicand peaks at 2 atan(b) and is -2 pi at 2 pi
    deepest = 2 * math.atan(b)
    if separatrix_radicand(deepest, b) <= 0:
        turn = deepest = 0.0
    else:
        turn = brentq(separatrix_radicand, deepest, 2 * math.pi, args=(b,), xtol=1e-14)
    vmin = -math.sqrt(2 * max(separatrix_radicand(deepest, b), 0.0))
    arg = (vmin + tau) * math.pi / (params.p2 * params.n_sites)
    edge = math.asin(arg) if -1 <= arg <= 1 else math.nan
    return SeparatrixGeometry(b, kr, turn, deepest, vmin, edge)


def k_lower_edge(params: DimensionlessParams, tau: float) -> float:
    """Lowest k reached by the separatrix at ``tau``; raises if undefined."""
    geo = separatrix_geometry(params, tau)
    if geo is None:
        raise ValueError("no separatrix: 4 p1 p2 cos k_r <= 1")
    if math.isnan(geo.k_lower_edge):
        raise EdgeOutOfBand("separatrix edge outside the band")
    return geo.k_lower_edge


def _edge_excess(p2, p1, p3, n, target_mode, k_edge):
    params = DimensionlessParams(p1, p2, p3, n)
    tau_f = crossing_time(target_mode, params)
    geo = separatrix_geometry(params, tau_f)
    if geo is None or math.isnan(geo.k_lower_edge):
        return math.nan
    return geo.k_lower_edge - k_edge


def separatrix_boundary(p1_values, n_sites: int = 80, p3: float = 0.0, target_mode: int = 15,
                        k_edge: float = math.pi / 4, p2_range=(1e-3, 1e3), scan: int = 400):
    """Smallest p2 at which the separatrix edge at ``tau_{target_mode}`` sits at ``k_edge``.

    Returns an array aligned with ``p1_values``; NaN where the edge never
    reaches ``k_edge`` (the separatrix is never that large).
    """
    grid = np.geomspace(p2_range[0], p2_range[1], scan)
    out = []
    for p1 in np.atleast_1d(p1_values):
        vals = np.array([_edge_excess(p2, p1, p3, n_sites, target_mode, k_edge) for p2 in grid])
        root = math.nan
        for j in range(grid.size - 1):
            a, b = vals[j], vals[j + 1]
            if np.isfinite(a) and np.isfinite(b) and a * b <= 0:
                root = brentq(_edge_excess, grid[j], grid[j + 1],
                              args=(p1, p3, n_sites, target_mode, k_edge), xtol=1e-12)
                break
        out.append(root)
    return np.array(out)


@dataclass
class EnsembleResult:
    trajectory: ReducedTrajectory
    captured: np.ndarray

    @property
    def fraction(self) -> float | None:
        if self.captured.size == 0:
            return None
        return float(np.mean(self.captured))


def run_ensemble(params: DimensionlessParams, count: int, tau_end: float, rule: str = "stable",
                 spread: float = 0.05, k_init: float = 0.0, seed: int = 0,
                 n_samples: int = 401, drive: DriveSchedule = LINEAR_CHIRP) -> EnsembleResult:
    """Launch ``count`` rays at tau=0 and flag the captured ones.

    ``rule``: ``stable`` jitters uniformly by ``spread`` around the pendulum
    well; ``uniform`` draws Phi uniformly on [-pi, pi).
    """
    if count == 0:
        empty = ReducedTrajectory(np.array([0.0, tau_end]), np.zeros((2, 0)), np.zeros((2, 0)), params)
        return EnsembleResult(empty, np.zeros(0, dtype=bool))
    rng = np.random.default_rng(seed)
    if rule == "stable":
        phi0 = stable_phase(params, 0.0) + rng.uniform(-spread, spread, count)
    elif rule == "uniform":
        phi0 = rng.uniform(-math.pi, math.pi, count)
    else:
        raise ValueError(f"unknown sampling rule {rule!r}")
    traj = integrate_reduced(phi0, k_init, params, 0.0, tau_end, drive, n_samples)
    return EnsembleResult(traj, detect_capture(traj))


def write_ensemble_csv(result: EnsembleResult, path, drive: DriveSchedule = LINEAR_CHIRP) -> Path:
    path = Path(path)
    traj = result.trajectory
    k0 = traj.params.k0
    theta = drive.theta_d(traj.tau)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ray_id", "tau", "x", "k", "phi", "captured_flag"])
        for r in range(traj.phi.shape[1]):
            flag = int(result.captured[r])
            for i, tau in enumerate(traj.tau):
                x = (traj.phi[i, r] + theta[i]) / k0
                w.writerow([r, repr(float(tau)), repr(float(x)), repr(float(traj.k[i, r])),
                            repr(float(traj.phi[i, r])), flag])
    return path
