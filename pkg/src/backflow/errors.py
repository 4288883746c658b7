"""Warning categories and exceptions shared across the package."""


class SaturationWarning(UserWarning):
    """An exponential factor overflowed and was clamped to a finite magnitude."""


class ClippedIntervalWarning(UserWarning):
    """A backflow interval touches the analysis window boundary and may be clipped."""


class SpuriousEigenvalueWarning(UserWarning):
    """Discretization produced eigenvalues outside the physical bound; they were dropped."""


class ProbabilityRangeError(ArithmeticError):
    """A probability came out of its admissible range by more than the tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to converge within its budget."""


class ConfigError(ValueError):
    """A scenario configuration is malformed or inconsistent."""
