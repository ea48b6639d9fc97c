"""Closed-form thresholds, regime boundaries and classification."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .core import DimensionlessParams, crossing_time
from .rays import separatrix_boundary, separatrix_geometry

__all__ = [
    "NLZ_CONSTANT",
    "LZ_HALF_TRANSFER_P1",
    "LC_MARGIN",
    "BOUNDARY_ZONE",
    "BracketError",
    "RegimeLabel",
    "RegimeBoundaries",
    "ModerateNSchedule",
    "lz_probability",
    "nlz_threshold",
    "lz_nlz_crossover_p3",
    "transition_duration",
    "ladder_threshold",
    "separation_p2",
    "ar_threshold_p2",
    "regime_boundaries",
    "classify",
    "bow_tie_efficiency",
    "moderate_n_rules",
    "bisect_threshold",
    "boundary_curves",
    "write_boundary_csv",
]

NLZ_CONSTANT = 0.29
LZ_HALF_TRANSFER_P1 = math.sqrt(math.log(2) / (2 * math.pi))
LC_MARGIN = 2.0  # how far above the separation line counts as ladder climbing
BOUNDARY_ZONE = 0.25  # relative half-width of the unreliable band around each line


class BracketError(ValueError):
    def __init__(self, lo, hi, f_lo, f_hi, target):
        super().__init__(f"no crossing of {target} in [{lo}, {hi}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")
        self.lo, self.hi, self.f_lo, self.f_hi = lo, hi, f_lo, f_hi


class RegimeLabel(str, enum.Enum):
    BELOW_AR_THRESHOLD = "below_ar_threshold"
    AUTORESONANCE = "autoresonance"
    LADDER_CLIMBING = "ladder_climbing"
    LARGE_SEPARATRIX = "large_separatrix"
    BOUNDARY_ZONE = "boundary_zone"


def lz_probability(p1: float) -> float:
    return 1.0 - math.exp(-2 * math.pi * p1 * p1)


def nlz_threshold(p3: float) -> float:
    if not p3 > 0:
        raise ValueError("the nonlinear threshold needs p3 > 0; use the LZ branch")
    return NLZ_CONSTANT / math.sqrt(p3)


def lz_nlz_crossover_p3() -> float:
    """Kerr strength at which the LZ and NLZ half-transfer thresholds coincide."""
    return (NLZ_CONSTANT / LZ_HALF_TRANSFER_P1) ** 2


def transition_duration(p1: float, p3: float) -> float:
    return 1.0 + p1 + 2.0 * p3


def ladder_threshold(r: int, p3: float = 0.0) -> float:
    """Drive strength moving half the population through ``r`` successive transitions."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if p3 > lz_nlz_crossover_p3():
        return nlz_threshold(p3)
    return math.sqrt(-math.log(1 - 2 ** (-1 / r)) / (2 * math.pi))


def separation_p2(p1: float, p3: float = 0.0) -> float:
    """Right-hand side of the ladder-climbing criterion ``p2 >> 1/2 + p1/2 + p3``."""
    return 0.5 + 0.5 * p1 + p3


def ar_threshold_p2(p1: float) -> float:
    """Smallest p2 allowing autoresonance, ``p1 p2 = 1/4`` (inf when p1 = 0)."""
    return math.inf if p1 <= 0 else 0.25 / p1


@dataclass(frozen=True)
class RegimeBoundaries:
    p1cr_lz: float
    p1cr_nlz: float
    p1cr_ladder: float
    delta_tau: float
    p2_separation: float
    p1p2_ar: float
    separatrix_p1: np.ndarray
    separatrix_p2: np.ndarray


def regime_boundaries(params: DimensionlessParams, r: int = 10, target_mode: int = 15,
                      p1_grid=None) -> RegimeBoundaries:
    if p1_grid is None:
        p1_grid = np.geomspace(0.1, 10.0, 41)
    p1_grid = np.asarray(p1_grid, dtype=float)
    sep = separatrix_boundary(p1_grid, params.n_sites, params.p3, target_mode)
    return RegimeBoundaries(
        p1cr_lz=LZ_HALF_TRANSFER_P1,
        p1cr_nlz=nlz_threshold(params.p3) if params.p3 > 0 else math.nan,
        p1cr_ladder=ladder_threshold(r, params.p3),
        delta_tau=transition_duration(params.p1, params.p3),
        p2_separation=separation_p2(params.p1, params.p3),
        p1p2_ar=0.25,
        separatrix_p1=p1_grid,
        separatrix_p2=sep,
    )


def _near(ratio: float) -> bool:
    return abs(ratio - 1.0) <= BOUNDARY_ZONE


def _large_separatrix(params, tau_f, k_edge):
    try:
        geo = separatrix_geometry(params, tau_f)
    except ValueError:  # drive already beyond the band
        return False
    if geo is None:
        return False
    return math.isnan(geo.k_lower_edge) or geo.k_lower_edge < k_edge


def classify(params: DimensionlessParams, tau_f: float | None = None,
             k_edge: float = math.pi / 4) -> RegimeLabel:
    """Regime of a parameter point at final time ``tau_f`` (default ``tau_15``).

    Rules are applied in order: below the AR threshold, above ``LC_MARGIN``
    times the separation line, inside the large-separatrix region; what is
    left is autoresonance unless it lies within ``BOUNDARY_ZONE`` (relative)
    of the AR or ladder line, where neither picture is trustworthy.
    """
    p1, p2, p3 = params.p1, params.p2, params.p3
    if tau_f is None:
        tau_f = crossing_time(min(15, params.n_sites - 1), params)
    lc_line = LC_MARGIN * separation_p2(p1, p3)
    if p1 * p2 < 0.25:
        return RegimeLabel.BELOW_AR_THRESHOLD
    if p2 > lc_line:
        return RegimeLabel.LADDER_CLIMBING
    if _large_separatrix(params, tau_f, k_edge):
        return RegimeLabel.LARGE_SEPARATRIX
    if _near(p1 * p2 / 0.25) or _near(p2 / lc_line):
        return RegimeLabel.BOUNDARY_ZONE
    return RegimeLabel.AUTORESONANCE


def bow_tie_efficiency(p1: float) -> float:
    """Transfer through the simultaneous three-level crossing at the ladder top."""
    return (1.0 - math.exp(-math.pi * p1 * p1)) ** 2


@dataclass(frozen=True)
class ModerateNSchedule:
    d: int
    l_max: int
    min_gap: float
    bow_tie: bool
    lc_feasible: bool
    bow_tie_efficiency: float | None


def moderate_n_rules(n: int, p1: float, p3: float, p2: float) -> ModerateNSchedule:
    if n < 2:
        raise ValueError("n must be >= 2")
    params = DimensionlessParams(p1, p2, p3, n)
    d = n // 4
    l_max = d + 1
    tau = lambda l: crossing_time(l, params)  # noqa: E731
    if n <= 4:
        gap = tau(1)
    elif n % 4:
        gap = tau(l_max) - tau(l_max - 1)
    else:
        gap = tau(l_max - 1) - tau(l_max - 2)
    bow = n % 4 == 0
    return ModerateNSchedule(d, l_max, gap, bow, gap > transition_duration(p1, p3),
                             bow_tie_efficiency(p1) if bow else None)


def bisect_threshold(measure: Callable[[float], float], lo: float, hi: float,
                     target: float = 0.5, tol: float = 1e-3, max_iter: int = 100):
    """Bisect for the drive strength at which ``measure`` crosses ``target``.

    ``measure`` must be monotone on ``[lo, hi]``. Returns ``(x, evaluations)``
    where ``evaluations`` lists every ``(x, measure(x))`` pair computed.
    """
    evals = []
    if hi == lo:
        return lo, evals
    f_lo, f_hi = measure(lo), measure(hi)
    evals += [(lo, f_lo), (hi, f_hi)]
    g_lo, g_hi = f_lo - target, f_hi - target
    if g_lo == 0:
        return lo, evals
    if g_hi == 0:
        return hi, evals
    if g_lo * g_hi > 0 or not (np.isfinite(g_lo) and np.isfinite(g_hi)):
        raise BracketError(lo, hi, f_lo, f_hi, target)
    for _ in range(max_iter):
        if abs(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = measure(mid)
        evals.append((mid, f_mid))
        if (f_mid - target) * g_lo > 0:
            lo, g_lo = mid, f_mid - target
        else:
            hi = mid
    return 0.5 * (lo + hi), evals


def boundary_curves(p1_values, p3: float = 0.0, n_sites: int = 80, r: int = 10,
                    target_mode: int = 15) -> dict[str, list[tuple[float, float]]]:
    """Sample the four regime lines of the (p1, p2) map.

    ``ladder`` is vertical at ``p1 = ladder_threshold(r, p3)`` and is reported
    as two points spanning the p2 range of the other curves.
    """
    p1_values = np.asarray(p1_values, dtype=float)
    ar = [(p1, ar_threshold_p2(p1)) for p1 in p1_values]
    separation = [(p1, separation_p2(p1, p3)) for p1 in p1_values]
    sep_p2 = separatrix_boundary(p1_values, n_sites, p3, target_mode)
    separatrix = [(p1, p2) for p1, p2 in zip(p1_values, sep_p2)]
    finite = [v for _, v in ar + separation if np.isfinite(v)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    pc = ladder_threshold(r, p3)
    return {
        "ladder": [(pc, lo), (pc, hi)],
        "ar": ar,
        "separation": separation,
        "separatrix": separatrix,
    }


def write_boundary_csv(kind: str, points, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p1", "p2_boundary", "line_kind"])
        for p1, p2 in points:
            w.writerow([repr(float(p1)), repr(float(p2)), kind])
    return path
