"""Exception and warning types shared across cusplab."""


class CuspLabError(Exception):
    """Base class for all cusplab errors."""


class DomainError(CuspLabError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RangeError(CuspLabError, ArithmeticError):
    """Result (or a required intermediate) cannot be represented, or an
    asymptotic-validity precondition such as ``r >= 5*sqrt(t)`` fails."""


class ResolutionError(CuspLabError, ValueError):
    """Grid too coarse or too short for the requested stencil."""


class UnsupportedError(CuspLabError, NotImplementedError):
    """Requested model or input shape is not handled."""


class RayObstructionError(CuspLabError, ArithmeticError):
    """A pole of the rational Borel approximant lies on the Laplace ray."""


class OptimalTruncationError(CuspLabError, ArithmeticError):
    """Asymptotic series terms never get small enough to truncate."""


class ConfigError(CuspLabError, ValueError):
    """Invalid run configuration."""


class FitError(CuspLabError, ValueError):
    """Input data unusable for a power-law fit."""


class AccuracyWarning(UserWarning):
    """Discretization heuristics suggest reduced accuracy."""
