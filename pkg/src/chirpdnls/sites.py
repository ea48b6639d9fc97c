"""Direct time integration of the chirped lattice equation in site space.

    i dpsi_n/dtau + (N^2 p2 / 4 pi^2)(psi_{n+1} + psi_{n-1} - 2 psi_n)
        + (N p3 |psi_n|^2 + 2 p1 cos phi_n) psi_n = 0,   phi_n = k0 n - theta_d

Two lattice variants: periodic boundaries with the traveling drive above, and
pinned ends (psi_0 = psi_{N-1} = 0) with the standing drive
``2 p1 cos(theta_d) cos(pi n / (N-1))``.

The integrator works in the interaction picture of the linear hopping term:
the unknowns are the lab-frame mode amplitudes ``a_m``, so the large band
frequencies never limit the step size. ``rhs_site`` gives the plain site-space
derivative and is used to cross-check that path.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import LINEAR_CHIRP, DimensionlessParams, DriveSchedule, dispersion_array, standing_dispersion
from .integrate import dopri5

__all__ = [
    "ConfigurationError",
    "Boundary",
    "DriveKind",
    "LatticeState",
    "IntegratorConfig",
    "SiteTrajectory",
    "ModeBasis",
    "mode_basis",
    "ground_state",
    "rhs_site",
    "integrate",
    "norm",
    "write_trajectory_csv",
]


class ConfigurationError(ValueError):
    pass


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    ZERO = "zero"


class DriveKind(str, enum.Enum):
    TRAVELING = "traveling"
    STANDING = "standing"


_COMPATIBLE = {Boundary.PERIODIC: DriveKind.TRAVELING, Boundary.ZERO: DriveKind.STANDING}


def _check_pairing(bc: Boundary, dk: DriveKind):
    bc, dk = Boundary(bc), DriveKind(dk)
    if _COMPATIBLE[bc] is not dk:
        raise ConfigurationError(f"{dk.value} drive cannot be used with {bc.value} boundaries")
    return bc, dk


@dataclass(frozen=True)
class LatticeState:
    amplitudes: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    sample_every: float = 1.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ConfigurationError("tolerances and max_step must be positive")
        if not self.sample_every > 0:
            raise ConfigurationError("sample_every must be positive")


@dataclass(frozen=True)
class ModeBasis:
    """Linear eigenmodes of the hopping operator for one boundary kind.

    ``vectors[:, j]`` is the spatial profile (on all N sites) of the mode with
    label ``labels[j]`` and frequency ``omegas[j]``.
    """

    boundary: Boundary
    labels: np.ndarray
    omegas: np.ndarray
    vectors: np.ndarray

    @property
    def interior(self) -> slice:
        n = self.vectors.shape[0]
        return slice(0, n) if self.boundary is Boundary.PERIODIC else slice(1, n - 1)


def mode_basis(params: DimensionlessParams, bc: Boundary = Boundary.PERIODIC) -> ModeBasis:
    n = params.n_sites
    bc = Boundary(bc)
    sites = np.arange(n)
    if bc is Boundary.PERIODIC:
        labels = np.arange(n)
        vectors = np.exp(2j * np.pi * np.outer(sites, labels) / n) / math.sqrt(n)
        omegas = dispersion_array(params)
    else:
        if n < 3:
            raise ConfigurationError("zero boundaries need at least 3 sites")
        labels = np.arange(1, n - 1)
        vectors = math.sqrt(2 / (n - 1)) * np.sin(np.pi * np.outer(sites, labels) / (n - 1))
        vectors = vectors.astype(complex)
        omegas = standing_dispersion(labels, params)
    return ModeBasis(bc, labels, omegas, vectors)


def ground_state(params: DimensionlessParams, bc: Boundary = Boundary.PERIODIC) -> LatticeState:
    """Lowest linear mode: uniform for periodic, the first sine for pinned ends."""
    basis = mode_basis(params, bc)
    return LatticeState(basis.vectors[:, 0].copy(), 0.0)


def _potential(tau, params, drive, dk, sites):
    n = params.n_sites
    if dk is DriveKind.TRAVELING:
        return 2 * params.p1 * np.cos(params.k0 * sites - drive.theta_d(tau))
    return 2 * params.p1 * math.cos(drive.theta_d(tau)) * np.cos(np.pi * sites / (n - 1))


def rhs_site(
    state: LatticeState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    bc: Boundary = Boundary.PERIODIC,
    dk: DriveKind = DriveKind.TRAVELING,
) -> np.ndarray:
    bc, dk = _check_pairing(bc, dk)
    psi = state.amplitudes
    n = params.n_sites
    if psi.shape != (n,):
        raise ConfigurationError(f"expected {n} site amplitudes, got shape {psi.shape}")
    hop = n * n * params.p2 / (4 * math.pi**2)
    sites = np.arange(n)
    if bc is Boundary.PERIODIC:
        lap = np.roll(psi, -1) + np.roll(psi, 1) - 2 * psi
    else:
        psi = psi.copy()
        psi[0] = psi[-1] = 0.0
        lap = np.zeros_like(psi)
        lap[1:-1] = psi[2:] + psi[:-2] - 2 * psi[1:-1]
    pot = n * params.p3 * np.abs(psi) ** 2 + _potential(state.tau, params, drive, dk, sites)
    out = 1j * (hop * lap + pot * psi)
    if bc is Boundary.ZERO:
        out[0] = out[-1] = 0.0
    return out


def norm(state) -> float:
    amps = state.amplitudes if hasattr(state, "amplitudes") else state
    return float(np.sum(np.abs(amps) ** 2))


@dataclass
class SiteTrajectory:
    tau: np.ndarray
    psi: np.ndarray  # (samples, N) site amplitudes
    modes: np.ndarray  # (samples, n_modes) lab-frame mode amplitudes a_m
    basis: ModeBasis
    n_steps: int

    def states(self):
        return [LatticeState(p, t) for t, p in zip(self.tau, self.psi)]

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=1)

    @property
    def final(self) -> LatticeState:
        return LatticeState(self.psi[-1], float(self.tau[-1]))


def _sample_grid(t0, t1, every):
    if t1 == t0:
        return np.array([t0])
    direction = 1.0 if t1 > t0 else -1.0
    count = int(math.floor(abs(t1 - t0) / every + 1e-9))
    grid = t0 + direction * every * np.arange(count + 1)
    if abs(grid[-1] - t1) > 1e-9 * max(1.0, abs(t1)):
        grid = np.append(grid, t1)
    else:
        grid[-1] = t1
    return grid


def integrate(
    state: LatticeState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    bc: Boundary = Boundary.PERIODIC,
    dk: DriveKind = DriveKind.TRAVELING,
    cfg: IntegratorConfig = IntegratorConfig(),
    tau_end: float = 1.0,
) -> SiteTrajectory:
    """Evolve ``state`` to ``tau_end`` (backwards too, if ``tau_end < state.tau``).

    Raises :class:`~chirpdnls.integrate.StiffnessError` if the step size
    collapses.
    """
    bc, dk = _check_pairing(bc, dk)
    basis = mode_basis(params, bc)
    inner = basis.interior
    U = basis.vectors[inner]
    Uh = U.conj().T
    omegas = basis.omegas
    n = params.n_sites
    sites = np.arange(n)[inner]
    kerr = n * params.p3

    if bc is Boundary.PERIODIC:
        def potential(tau):
            return 2 * params.p1 * np.cos(params.k0 * sites - drive.theta_d(tau))
    else:
        profile = 2 * params.p1 * np.cos(np.pi * sites / (n - 1))

        def potential(tau):
            return math.cos(drive.theta_d(tau)) * profile

    def rhs(tau, a):
        rot = np.exp(1j * omegas * tau)
        psi = U @ (a / rot)
        w = kerr * (psi.real**2 + psi.imag**2) + potential(tau)
        return 1j * rot * (Uh @ (w * psi))

    t0 = float(state.tau)
    psi0 = np.asarray(state.amplitudes, dtype=complex)
    a0 = np.exp(1j * omegas * t0) * (Uh @ psi0[inner])
    grid = _sample_grid(t0, float(tau_end), cfg.sample_every)
    sol = dopri5(rhs, a0, t0, float(tau_end), sample_times=grid, rtol=cfg.rel_tol,
                 atol=cfg.abs_tol, max_step=cfg.max_step)
    psi = np.zeros((grid.size, n), dtype=complex)
    psi[:, inner] = (sol.y * np.exp(-1j * np.outer(grid, omegas))) @ U.T
    return SiteTrajectory(grid, psi, sol.y, basis, sol.n_steps)


def write_trajectory_csv(traj: SiteTrajectory, path) -> Path:
    path = Path(path)
    n = traj.psi.shape[1]
    header = ["tau"]
    for j in range(n):
        header += [f"re_psi_{j}", f"im_psi_{j}"]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for tau, row in zip(traj.tau, traj.psi):
            vals = [repr(float(tau))]
            for z in row:
                vals += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow(vals)
    return path
