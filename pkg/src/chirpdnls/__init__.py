"""Chirped-drive transport in a discrete nonlinear Schroedinger lattice.

A ring (or pinned chain) of N sites is driven by a traveling wave whose
frequency grows linearly in time. Energy climbs the band of lattice modes
either by successive Landau-Zener transitions (ladder climbing) or by
continuous phase locking (autoresonance). The package integrates the lattice
in site space and in mode space, evaluates the closed-form regime
boundaries, and follows semiclassical rays of the locked wave.
"""

from .core import (
    LINEAR_CHIRP,
    DimensionlessParams,
    DriveSchedule,
    InvalidParameterError,
    PhysicalParams,
    crossing_schedule,
    crossing_time,
    dispersion,
    dispersion_array,
    linear_mode,
    standing_dispersion,
    to_dimensionless,
)
from .integrate import StiffnessError, dopri5
from .modes import (
    EfficiencyWindow,
    Frame,
    FrameError,
    ModeState,
    TwoLevelState,
    efficiency,
    ground_modes,
    integrate_modes,
    integrate_two_level,
    modes_to_site,
    periodic_ladder,
    site_to_modes,
    two_level_ladder,
    zero_ladder,
)
from .regimes import RegimeLabel, classify, regime_boundaries
from .sites import Boundary, DriveKind, IntegratorConfig, LatticeState, ground_state, integrate

__version__ = "0.1.0"

__all__ = [
    "LINEAR_CHIRP",
    "DimensionlessParams",
    "DriveSchedule",
    "InvalidParameterError",
    "PhysicalParams",
    "crossing_schedule",
    "crossing_time",
    "dispersion",
    "dispersion_array",
    "linear_mode",
    "standing_dispersion",
    "to_dimensionless",
    "StiffnessError",
    "dopri5",
    "EfficiencyWindow",
    "Frame",
    "FrameError",
    "ModeState",
    "TwoLevelState",
    "efficiency",
    "ground_modes",
    "integrate_modes",
    "integrate_two_level",
    "modes_to_site",
    "periodic_ladder",
    "site_to_modes",
    "two_level_ladder",
    "zero_ladder",
    "RegimeLabel",
    "classify",
    "regime_boundaries",
    "Boundary",
    "DriveKind",
    "IntegratorConfig",
    "LatticeState",
    "ground_state",
    "integrate",
]
