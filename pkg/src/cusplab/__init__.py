"""Short-time dynamics of cusped wavefunctions: closed forms, series, propagation, analysis."""

from importlib import metadata as _metadata

from .errors import (AccuracyWarning, ConfigError, CuspLabError, DomainError, FitError,
                     OptimalTruncationError, RangeError, RayObstructionError, ResolutionError,
                     UnsupportedError)
from .models import ModelParams

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

__all__ = [
    "AccuracyWarning", "ConfigError", "CuspLabError", "DomainError", "FitError", "ModelParams",
    "OptimalTruncationError", "RangeError", "RayObstructionError", "ResolutionError",
    "UnsupportedError", "__version__",
]
