"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the region where a quantity is defined."""


class QuadratureError(RuntimeError):
    """Adaptive integration hit its subdivision cap.

    The best available estimate is kept on the exception so callers can
    decide whether it is still usable.
    """

    def __init__(self, message, value=None, error_estimate=None, evaluations=0):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations


class DegenerateError(ValueError):
    """Input is valid but degenerate (zero slope, epsilon = 0, u = v = 0)."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed or a trajectory escaped its region."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
