"""Periodic asymptotic state of a driven impurity in the isotropic XY chain.

The package computes the state two ways, by a renormalized reed series in
the drive amplitude and by direct time stepping of the Volterra equation
with a Bessel memory kernel, and measures how fast the second approaches
the first.
"""

__version__ = "0.1.0"

from .drive import DriveSpec, Regime, RegimeTag, classify, evaluate_drive, validate
from .errors import (
    BandEdgeSingular,
    ConfigError,
    DegenerateDenominator,
    IllConditioned,
    QuadratureNoConvergence,
    ReedsimError,
    SeriesNotConverging,
    StepTooLarge,
    TooSmallA,
    UnsupportedRegime,
)
from .propagators import RenormContext, chebyshev_nodes, j_k
from .reed_series import ModeVector, Reed, fixed_point_oracle, psi_coefficients
from .volterra import TimeGrid, TimeSeries, evolve
from .convergence import ConvergenceReport, measure_delta

__all__ = [
    "__version__",
    "DriveSpec",
    "Regime",
    "RegimeTag",
    "classify",
    "evaluate_drive",
    "validate",
    "RenormContext",
    "chebyshev_nodes",
    "j_k",
    "ModeVector",
    "Reed",
    "fixed_point_oracle",
    "psi_coefficients",
    "TimeGrid",
    "TimeSeries",
    "evolve",
    "ConvergenceReport",
    "measure_delta",
    "BandEdgeSingular",
    "ConfigError",
    "DegenerateDenominator",
    "IllConditioned",
    "QuadratureNoConvergence",
    "ReedsimError",
    "SeriesNotConverging",
    "StepTooLarge",
    "TooSmallA",
    "UnsupportedRegime",
]
