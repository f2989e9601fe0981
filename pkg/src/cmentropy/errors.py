"""Exception hierarchy shared by all modules.

Public functions raise these instead of bare ValueError/RuntimeError so the
CLI can map failures onto stable exit codes.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ToolkitError, ValueError):
    """A parameter violates its stated domain (e.g. a non-positive variance)."""


class InputError(ToolkitError, ValueError):
    """Numeric input data violates its contract (e.g. a pdf that does not normalize)."""


class DistortionDomainError(ToolkitError, ValueError):
    """A distortion value lies outside the validity window of the requested bound."""


class ConvergenceError(ToolkitError, RuntimeError):
    """A numeric routine did not converge within its budget.

    ``estimate`` carries the best available value, when one exists.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class FarTailError(ToolkitError, ValueError):
    """The requested observation lies beyond the usable range of the marginal."""


class DegenerateSampleError(ToolkitError, ValueError):
    """Sample set is too tie-heavy for a nearest-neighbor entropy estimate."""


class UnsupportedInputError(ToolkitError, ValueError):
    """The input law lacks the regularity required by the requested quantity."""


class IdentityViolationError(ToolkitError, RuntimeError):
    """Two computation routes for the same quantity disagree beyond tolerance."""


class SpecStringError(ToolkitError, ValueError):
    """A distribution/channel spec string could not be parsed."""
