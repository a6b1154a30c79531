"""Exception types raised across the package."""


class SubradiantError(Exception):
    """Base class for all package errors."""


class SingularGeometryError(SubradiantError, ValueError):
    """Dipole separation is zero or otherwise degenerate."""


class ChannelError(SubradiantError, ValueError):
    """Jump channels were requested for parameters they do not support."""


class InvalidStateError(SubradiantError, ValueError):
    """A density matrix violates trace, Hermiticity or positivity tolerances."""


class StiffnessError(SubradiantError, RuntimeError):
    """The adaptive integrator could not make progress."""


class InsufficientHorizonError(SubradiantError, ValueError):
    """The trajectory ends before the population has decayed enough to fit."""


class FitQualityError(SubradiantError, ValueError):
    """The decay tail is not a clean single exponential."""


class ConfigError(SubradiantError, ValueError):
    """A scenario config failed to parse or validate.

    ``line`` is the 1-based line number in the source text, or None when the
    problem is not tied to a specific line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
