"""Exception types shared by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConfigurationError(ValueError):
    """Invalid configuration (quadrature order, sweep definitions, CLI options)."""


class AccuracyError(ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy.

    The last estimate and the gap between the final two refinements are
    kept so callers can decide whether the result is still usable.
    """

    def __init__(self, message, estimate=None, gap=None):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap
