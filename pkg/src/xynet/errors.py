"""Exception types raised across the package."""


class XYNetError(Exception):
    """Base class for all library errors."""


class PreconditionError(XYNetError, ValueError):
    """An input violates a documented precondition."""


class ParameterError(XYNetError, ValueError):
    """A model parameter is outside its admissible range."""


class SizeError(XYNetError, ValueError):
    """A requested matrix would exceed the configured size cap."""


class ConvergenceError(XYNetError, RuntimeError):
    """An iterative solver exhausted its budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericError(XYNetError, ArithmeticError):
    """A computation produced non-finite values."""


class ConsistencyError(XYNetError, ValueError):
    """Inputs are mutually inconsistent (e.g. an amplitude above one)."""


class ResolutionError(XYNetError, ValueError):
    """A time grid is too coarse for the requested analysis."""


class IntegrationError(XYNetError, RuntimeError):
    """A state left its admissible set during time integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(XYNetError, ValueError):
    """A scenario configuration failed validation."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
