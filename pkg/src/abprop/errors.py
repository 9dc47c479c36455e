"""Exception types shared across the package."""

__all__ = ["AccuracyError"]


class AccuracyError(ArithmeticError):
    """Raised when a series or quadrature cannot reach the requested tolerance.

    Carries the best value obtained so far and an estimate of its error, so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, value=None, err_est=None):
        super().__init__(message)
        self.value = value
        self.err_est = err_est
