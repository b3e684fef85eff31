"""Exception hierarchy shared by all reedsim modules."""


class ReedsimError(Exception):
    """Base class for every error raised by reedsim."""


class BandEdgeSingular(ReedsimError, ValueError):
    """An inverse-square-root band-edge singularity was hit."""


class QuadratureNoConvergence(ReedsimError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions."""


class TooSmallA(ReedsimError, ValueError):
    """The asymptotic tail formula was requested below its split threshold."""


class DegenerateDenominator(ReedsimError, ArithmeticError):
    """A renormalized propagator denominator vanished."""


class SeriesNotConverging(ReedsimError, ArithmeticError):
    """Partial sums of the reed series failed the ratio test."""


class IllConditioned(ReedsimError, ArithmeticError):
    """The truncated mode system is too ill-conditioned to trust."""


class StepTooLarge(ReedsimError, ValueError):
    """The time step violates the solver stability guard."""


class UnsupportedRegime(ReedsimError, ValueError):
    """The drive parameters fall outside both supported regimes."""


class ConfigError(ReedsimError, ValueError):
    """A configuration file or DriveSpec failed validation."""
