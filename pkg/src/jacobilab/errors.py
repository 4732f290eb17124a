"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TruncationError(ArithmeticError):
    """A series did not converge within the allotted number of terms."""


class AccuracyError(ArithmeticError):
    """A computation finished but could not certify the requested tolerance.

    Carries the best available estimate and an error bound so callers can
    decide whether to accept the degraded result.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class ConstructionError(ValueError):
    """An object (atom, rule, ...) cannot be built from the given parameters."""


class CalibrationError(RuntimeError):
    """No feasible constant was found during an empirical calibration sweep."""
