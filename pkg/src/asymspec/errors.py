"""Exception hierarchy shared by all asymspec modules."""


class AsymSpecError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AsymSpecError, ValueError):
    pass


class InvalidSpectrumError(AsymSpecError, ValueError):
    pass


class ParameterError(AsymSpecError, ValueError):
    pass


class PreconditionError(AsymSpecError, ValueError):
    pass


class ConvergenceError(AsymSpecError, RuntimeError):
    """An iterative solver ran out of budget.

    ``residual`` holds the last residual norm observed, when one exists.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class OracleFailure(AsymSpecError, RuntimeError):
    """The characteristic-polynomial oracle could not certify its roots."""


class DegenerateCorrectionError(AsymSpecError, ArithmeticError):
    """The shrinkage correction would take the square root of a negative number."""


class PartialFailureError(AsymSpecError, RuntimeError):
    pass


class ConfigError(AsymSpecError, ValueError):
    pass
