"""Numerical toolkit for the differential entropy of conditional-mean estimators.

Computes h(E[X|Y]) for Y = X + W with Gaussian W (and a Gamma-family
generalization), every bound on it, and the derived remote source coding /
CEO rate-loss curves.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    DistortionDomainError,
    FarTailError,
    IdentityViolationError,
    InputError,
    ParameterError,
    SpecStringError,
    ToolkitError,
    UnsupportedInputError,
)
from .numerics import (
    EstimateWithError,
    QuadratureRule,
    central_diff,
    combined_tol,
    digamma,
    entropy_from_pdf,
    gauss_hermite,
    integrate,
    knn_entropy,
    log_gamma,
)

__all__ = [
    "__version__",
    "ToolkitError",
    "ParameterError",
    "InputError",
    "DistortionDomainError",
    "ConvergenceError",
    "FarTailError",
    "DegenerateSampleError",
    "UnsupportedInputError",
    "IdentityViolationError",
    "SpecStringError",
    "EstimateWithError",
    "QuadratureRule",
    "gauss_hermite",
    "integrate",
    "entropy_from_pdf",
    "knn_entropy",
    "central_diff",
    "log_gamma",
    "digamma",
    "combined_tol",
]
