"""Parameters, linear dispersion, crossing times and drive schedules.

Everything downstream works in the dimensionless time ``tau = sqrt(alpha) t``
and the three control parameters

    p1 = eps / (2 sqrt(alpha))               drive strength
    p2 = 4 pi^2 / (delta^2 N^2 sqrt(alpha))  dispersion
    p3 = beta / (N sqrt(alpha))              Kerr nonlinearity
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "InvalidParameterError",
    "PhysicalParams",
    "DimensionlessParams",
    "DriveSchedule",
    "LinearMode",
    "LINEAR_CHIRP",
    "to_dimensionless",
    "dispersion",
    "dispersion_array",
    "standing_dispersion",
    "linear_mode",
    "crossing_time",
    "crossing_schedule",
]


class InvalidParameterError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    epsilon: float
    alpha: float
    delta: float
    beta: float
    n_sites: int


@dataclass(frozen=True)
class DimensionlessParams:
    p1: float
    p2: float
    p3: float
    n_sites: int
    k0: float = field(init=False)

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidParameterError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        if not self.p2 > 0:
            raise InvalidParameterError(f"p2 must be positive, got {self.p2}")
        if self.p1 < 0 or self.p3 < 0:
            raise InvalidParameterError("p1 and p3 must be non-negative")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "k0", 2 * math.pi / self.n_sites)

    @property
    def band_scale(self) -> float:
        """``p2 N^2 / pi^2``: the top of the linear band."""
        return self.p2 * self.n_sites**2 / math.pi**2

    def replace(self, **changes) -> "DimensionlessParams":
        kw = dict(p1=self.p1, p2=self.p2, p3=self.p3, n_sites=self.n_sites)
        kw.update(changes)
        return DimensionlessParams(**kw)


@dataclass(frozen=True)
class DriveSchedule:
    """Drive phase ``theta_d(tau)`` and its exact derivative ``omega_d(tau)``.

    Both callables must accept scalars and numpy arrays.
    """

    theta_d: Callable[[float], float]
    omega_d: Callable[[float], float]
    name: str = "custom"


def _quad_theta(tau):
    return 0.5 * tau * tau


def _quad_omega(tau):
    return tau


LINEAR_CHIRP = DriveSchedule(_quad_theta, _quad_omega, "linear-chirp")


@dataclass(frozen=True)
class LinearMode:
    index: int
    k: float
    omega: float
    delta_omega: float


def to_dimensionless(p: PhysicalParams) -> DimensionlessParams:
    if not p.alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {p.alpha}")
    if not p.delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {p.delta}")
    if int(p.n_sites) != p.n_sites or p.n_sites < 2:
        raise InvalidParameterError(f"n_sites must be an integer >= 2, got {p.n_sites}")
    if p.epsilon < 0 or p.beta < 0:
        raise InvalidParameterError("epsilon and beta must be non-negative")
    n = int(p.n_sites)
    sa = math.sqrt(p.alpha)
    return DimensionlessParams(
        p1=p.epsilon / (2 * sa),
        p2=4 * math.pi**2 / (p.delta**2 * n**2 * sa),
        p3=p.beta / (n * sa),
        n_sites=n,
    )


def _check_index(l, lo, hi):
    if int(l) != l or not lo <= l <= hi:
        raise IndexError(f"mode index {l} outside [{lo}, {hi}]")


def dispersion(l: int, params: DimensionlessParams) -> float:
    """Dimensionless frequency of traveling mode ``l``."""
    n = params.n_sites
    _check_index(l, 0, n - 1)
    return params.band_scale * math.sin(math.pi * l / n) ** 2


def dispersion_array(params: DimensionlessParams) -> np.ndarray:
    n = params.n_sites
    return params.band_scale * np.sin(np.pi * np.arange(n) / n) ** 2


def standing_dispersion(m, params: DimensionlessParams):
    """Frequencies of the zero-boundary standing modes, ``k_m = pi m / (N-1)``."""
    n = params.n_sites
    return params.band_scale * np.sin(np.pi * np.asarray(m) / (2 * (n - 1))) ** 2


def linear_mode(m: int, params: DimensionlessParams) -> LinearMode:
    n = params.n_sites
    _check_index(m, 0, n - 1)
    w = dispersion(m, params)
    w_prev = dispersion((m - 1) % n, params)
    return LinearMode(m, 2 * math.pi * m / n, w, w - w_prev)


def crossing_time(l: int, params: DimensionlessParams) -> float:
    """Time of the ``l-1 <-> l`` energy crossing under the linear chirp."""
    n = params.n_sites
    _check_index(l, 1, n - 1)
    return params.band_scale * math.sin(math.pi / n) * math.sin(math.pi * (2 * l - 1) / n)


def crossing_schedule(params: DimensionlessParams) -> np.ndarray:
    """Crossing times ``tau_1 ... tau_{floor(N/4)+1}`` of the resonant pathway."""
    n = params.n_sites
    top = min(n // 4 + 1, n - 1)
    return np.array([crossing_time(l, params) for l in range(1, top + 1)])
