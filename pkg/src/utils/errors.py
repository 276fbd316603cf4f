"""Exception hierarchy shared by all neckflow packages."""


class NeckflowError(Exception):
    """Base class for every error raised by neckflow."""


class InvalidShapeError(NeckflowError, ValueError):
    """Cassini parameters outside the single-loop regime or grid too coarse."""


class ConstructionError(NeckflowError):
    """A constructed profile curve contains non-finite values."""


class SingularCurveError(NeckflowError):
    """A regular curve was required but some radius is non-positive."""


class NumericalFailure(NeckflowError):
    """A time step produced non-finite values."""


class StepCollapseError(NumericalFailure):
    """The adaptive time step dropped below dt_min."""


class SolverFailure(NeckflowError):
    """The soliton integrator could not meet its tolerance."""


class DomainError(NeckflowError, ValueError):
    """Argument outside the domain of an operation."""


class FitError(NeckflowError):
    """Not enough (or invalid) data for a least-squares fit."""


class BracketError(NeckflowError):
    """Bisection endpoints do not bracket the transition."""


class MonotonicityViolation(NeckflowError):
    """Classification is not monotone in the shape parameter."""

    def __init__(self, message: str, lambdas: tuple = ()):
        super().__init__(message)
        self.lambdas = tuple(lambdas)


class ConfigError(NeckflowError, ValueError):
    """Invalid configuration value; carries the offending field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class MissingInputError(NeckflowError, OSError):
    """An input file or table column required by a command is absent."""
