"""Rotating-frame mode dynamics and two-level reductions.

In the frame co-rotating with the drive harmonics the mode amplitudes obey

    i db_l/dtau = -(l omega_d - omega_l) b_l + g_nl |b_l|^2 b_l - g (b_{l-1} + b_{l+1})

with ``g = p1``, ``g_nl = p3`` for the periodic lattice and ``g = p1/2``,
``g_nl = N p3 / (2(N-1))`` for pinned ends. Couplings across the ends of the
ladder (0 <-> N-1) are dropped; they never come into resonance for tau > 0.

Integration is carried out on the lab-frame amplitudes
``a_l = b_l exp(-i(l theta_d - omega_l tau - s tau))`` whose phases only rotate
at the slow detunings, and converted back on output.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import LINEAR_CHIRP, DimensionlessParams, DriveSchedule, dispersion_array, standing_dispersion
from .integrate import dopri5
from .sites import Boundary, IntegratorConfig, LatticeState, _sample_grid, mode_basis

__all__ = [
    "FrameError",
    "Frame",
    "Ladder",
    "ModeState",
    "ModeTrajectory",
    "TwoLevelState",
    "EfficiencyWindow",
    "periodic_ladder",
    "zero_ladder",
    "two_level_ladder",
    "site_to_modes",
    "modes_to_site",
    "ground_modes",
    "rhs_modes",
    "rhs_two_level",
    "integrate_modes",
    "integrate_two_level",
    "efficiency",
    "populations",
    "shifted_indices",
    "write_mode_history_csv",
    "write_histogram_csv",
]


class FrameError(ValueError):
    pass


class Frame(str, enum.Enum):
    LAB = "lab"
    ROTATING = "rotating"


@dataclass(frozen=True)
class Ladder:
    """Coefficients of one rotating-frame mode system.

    ``labels`` are the drive harmonics (mode numbers) of the slots; neighbouring
    slots are coupled with strength ``coupling``. ``self_shift`` is the uniform
    nonlinear frequency shift absorbed into the rotating frame.
    """

    labels: np.ndarray
    omegas: np.ndarray
    coupling: float
    kerr: float
    self_shift: float = 0.0
    n_sites: int | None = None

    def phases(self, tau, drive: DriveSchedule) -> np.ndarray:
        return self.labels * drive.theta_d(tau) - (self.omegas + self.self_shift) * tau


def periodic_ladder(params: DimensionlessParams) -> Ladder:
    n = params.n_sites
    return Ladder(np.arange(n), dispersion_array(params), params.p1, params.p3,
                  2 * params.p3, n)


def zero_ladder(params: DimensionlessParams) -> Ladder:
    n = params.n_sites
    labels = np.arange(1, n - 1)
    kerr = n * params.p3 / (2 * (n - 1))
    return Ladder(labels, standing_dispersion(labels, params), params.p1 / 2, kerr, 3 * kerr, n)


def two_level_ladder(params: DimensionlessParams, l: int = 1) -> Ladder:
    """Isolated ``l-1 <-> l`` pair of the periodic ladder."""
    omegas = dispersion_array(params)
    if not 1 <= l <= params.n_sites - 1:
        raise IndexError(f"upper level {l} outside [1, {params.n_sites - 1}]")
    return Ladder(np.array([l - 1, l]), omegas[[l - 1, l]], params.p1, params.p3,
                  2 * params.p3, params.n_sites)


def _ladder_for(params, bc):
    return periodic_ladder(params) if Boundary(bc) is Boundary.PERIODIC else zero_ladder(params)


@dataclass(frozen=True)
class ModeState:
    """Mode amplitudes in ladder-slot order (labels 0..N-1, or 1..N-2 for pinned ends)."""

    amplitudes: np.ndarray
    frame: Frame = Frame.ROTATING
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))
        object.__setattr__(self, "frame", Frame(self.frame))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_frame(self, frame: Frame, ladder: Ladder, drive: DriveSchedule = LINEAR_CHIRP) -> "ModeState":
        frame = Frame(frame)
        if frame is self.frame:
            return self
        ph = np.exp(1j * ladder.phases(self.tau, drive))
        if frame is Frame.ROTATING:
            return ModeState(self.amplitudes * ph, frame, self.tau)
        return ModeState(self.amplitudes / ph, frame, self.tau)


@dataclass(frozen=True)
class TwoLevelState:
    b_lo: complex
    b_hi: complex
    l: int = 1
    tau: float = 0.0

    def gammas(self, params: DimensionlessParams, drive: DriveSchedule = LINEAR_CHIRP):
        """Diagonal energies ``Gamma_{l-1}, Gamma_l``."""
        lad = two_level_ladder(params, self.l)
        wd = drive.omega_d(self.tau)
        g_lo = params.p3 * abs(self.b_lo) ** 2 - (self.l - 1) * wd + lad.omegas[0]
        g_hi = params.p3 * abs(self.b_hi) ** 2 - self.l * wd + lad.omegas[1]
        return g_lo, g_hi


@dataclass(frozen=True)
class EfficiencyWindow:
    lo_mode: int
    hi_mode: int
    n_sites: int = field(default=0, compare=False)

    def __post_init__(self):
        if not 0 < self.lo_mode <= self.hi_mode:
            raise ValueError(f"invalid window [{self.lo_mode}, {self.hi_mode}]")
        if self.n_sites and 2 * self.hi_mode > self.n_sites:
            raise ValueError("window must lie below N/2")

    @classmethod
    def default(cls, n_sites: int) -> "EfficiencyWindow":
        lo = max(1, math.ceil(n_sites / 8))
        hi = max(lo, n_sites // 4)
        return cls(lo, hi, n_sites)

    @property
    def k_lower_edge(self) -> float:
        return 2 * math.pi * self.lo_mode / self.n_sites if self.n_sites else math.nan


def site_to_modes(
    s: LatticeState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    frame: Frame = Frame.ROTATING,
    bc: Boundary = Boundary.PERIODIC,
) -> ModeState:
    basis = mode_basis(params, bc)
    proj = basis.vectors.conj().T @ np.asarray(s.amplitudes, dtype=complex)
    a = np.exp(1j * basis.omegas * s.tau) * proj
    lab = ModeState(a, Frame.LAB, s.tau)
    return lab.to_frame(frame, _ladder_for(params, bc), drive)


def modes_to_site(
    m: ModeState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    bc: Boundary = Boundary.PERIODIC,
) -> LatticeState:
    basis = mode_basis(params, bc)
    a = m.to_frame(Frame.LAB, _ladder_for(params, bc), drive).amplitudes
    psi = basis.vectors @ (np.exp(-1j * basis.omegas * m.tau) * a)
    return LatticeState(psi, m.tau)


def ground_modes(ladder: Ladder, tau: float = 0.0) -> ModeState:
    amps = np.zeros(ladder.labels.size, dtype=complex)
    amps[0] = 1.0
    return ModeState(amps, Frame.ROTATING, tau)


def _rotating_rhs(b, tau, ladder: Ladder, drive: DriveSchedule):
    detune = ladder.labels * drive.omega_d(tau) - ladder.omegas
    hop = np.zeros_like(b)
    hop[1:] += b[:-1]
    hop[:-1] += b[1:]
    return 1j * (detune * b - ladder.kerr * np.abs(b) ** 2 * b + ladder.coupling * hop)


def rhs_modes(
    m: ModeState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    ladder: Ladder | None = None,
) -> np.ndarray:
    """``db_l/dtau`` of the rotating-frame system (periodic ladder by default)."""
    if m.frame is not Frame.ROTATING:
        raise FrameError("rhs_modes needs rotating-frame amplitudes")
    ladder = ladder or periodic_ladder(params)
    return _rotating_rhs(m.amplitudes, m.tau, ladder, drive)


def rhs_two_level(t: TwoLevelState, params: DimensionlessParams,
                  drive: DriveSchedule = LINEAR_CHIRP) -> np.ndarray:
    g_lo, g_hi = t.gammas(params, drive)
    p1 = params.p1
    return np.array([-1j * (g_lo * t.b_lo - p1 * t.b_hi),
                     -1j * (-p1 * t.b_lo + g_hi * t.b_hi)])


@dataclass
class ModeTrajectory:
    tau: np.ndarray
    amplitudes: np.ndarray  # (samples, slots), rotating frame
    ladder: Ladder
    n_steps: int

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norms(self) -> np.ndarray:
        return self.populations().sum(axis=1)

    @property
    def final(self) -> ModeState:
        return ModeState(self.amplitudes[-1], Frame.ROTATING, float(self.tau[-1]))


def _lab_rhs_factory(ladder: Ladder, drive: DriveSchedule):
    labels = ladder.labels.astype(float)
    shifted = ladder.omegas + ladder.self_shift
    g, kerr, shift = ladder.coupling, ladder.kerr, ladder.self_shift

    def rhs(tau, a):
        rot = np.exp(1j * (labels * drive.theta_d(tau) - shifted * tau))
        b = a * rot
        hop = np.empty_like(b)
        hop[0] = 0.0
        hop[1:] = b[:-1]
        hop[:-1] += b[1:]
        return 1j * (shift * a + (g * hop - kerr * (b.real**2 + b.imag**2) * b) / rot)

    return rhs


def integrate_modes(
    state: ModeState,
    ladder: Ladder,
    drive: DriveSchedule = LINEAR_CHIRP,
    cfg: IntegratorConfig = IntegratorConfig(),
    tau_end: float = 1.0,
    sample_times=None,
) -> ModeTrajectory:
    """Evolve a ladder from ``state`` to ``tau_end``; samples are rotating-frame."""
    lab = state.to_frame(Frame.LAB, ladder, drive)
    t0 = float(state.tau)
    grid = _sample_grid(t0, float(tau_end), cfg.sample_every) if sample_times is None \
        else np.asarray(sample_times, dtype=float)
    sol = dopri5(_lab_rhs_factory(ladder, drive), lab.amplitudes, t0, float(tau_end),
                 sample_times=grid, rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step)
    rot = np.exp(1j * (np.outer(drive.theta_d(grid), ladder.labels)
                       - np.outer(grid, ladder.omegas + ladder.self_shift)))
    return ModeTrajectory(grid, sol.y * rot, ladder, sol.n_steps)


def integrate_two_level(
    state: TwoLevelState,
    params: DimensionlessParams,
    drive: DriveSchedule = LINEAR_CHIRP,
    cfg: IntegratorConfig = IntegratorConfig(),
    tau_end: float = 1.0,
) -> ModeTrajectory:
    """Two-level engine; ``state.tau`` may start anywhere before the crossing."""
    ladder = two_level_ladder(params, state.l)
    m = ModeState([state.b_lo, state.b_hi], Frame.ROTATING, state.tau)
    return integrate_modes(m, ladder, drive, cfg, tau_end)


def populations(m) -> np.ndarray:
    return np.abs(m.amplitudes) ** 2


def efficiency(m: ModeState, w: EfficiencyWindow, ladder: Ladder | None = None) -> float:
    """Total population of modes ``w.lo_mode .. w.hi_mode`` (inclusive)."""
    pops = m.populations()
    labels = np.arange(pops.size) if ladder is None else ladder.labels
    sel = (labels >= w.lo_mode) & (labels <= w.hi_mode)
    return float(min(1.0, max(0.0, pops[sel].sum())))


def shifted_indices(labels, n_sites: int) -> np.ndarray:
    """Report modes above N/2 as negative wavenumbers ``l - N``."""
    labels = np.asarray(labels)
    return np.where(labels > n_sites / 2, labels - n_sites, labels)


def write_mode_history_csv(traj: ModeTrajectory, path) -> Path:
    path = Path(path)
    pops = traj.populations()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau"] + [f"pop_{l}" for l in traj.ladder.labels])
        for tau, row in zip(traj.tau, pops):
            w.writerow([repr(float(tau))] + [repr(float(p)) for p in row])
    return path


def write_histogram_csv(m: ModeState, ladder: Ladder, path) -> Path:
    path = Path(path)
    n = ladder.n_sites or ladder.labels.size
    idx = shifted_indices(ladder.labels, n)
    order = np.argsort(idx, kind="stable")
    pops = m.populations()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode_index_shifted", "population"])
        for j in order:
            w.writerow([int(idx[j]), repr(float(pops[j]))])
    return path
