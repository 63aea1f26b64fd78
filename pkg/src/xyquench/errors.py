"""Exception hierarchy shared by the numerical modules and the CLI."""


class XYQuenchError(Exception):
    """Base class for all package errors."""


class ConfigError(XYQuenchError, ValueError):
    """Invalid model parameters or run configuration (CLI exit code 2)."""


class NumericalError(XYQuenchError):
    """A computation failed numerically (CLI exit code 3)."""


class NonConvergence(NumericalError):
    """Adaptive quadrature exhausted its evaluation budget."""

    def __init__(self, message, value=None, error_estimate=None, evaluations=None, label=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations
        self.label = label


class DomainError(NumericalError, ValueError):
    pass


class PhysicalityError(NumericalError):
    """A reduced density matrix is not a valid quantum state within tolerance."""


class NotHermitian(NumericalError, ValueError):
    pass


class NoTransitionFound(XYQuenchError):
    pass


class InsufficientData(XYQuenchError, ValueError):
    pass


class BadSize(ConfigError):
    pass


class TooLarge(ConfigError):
    pass


class DimensionMismatch(XYQuenchError, ValueError):
    pass


class ValidationFailure(XYQuenchError):
    """Cross-validation between independent routes exceeded tolerance."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)
