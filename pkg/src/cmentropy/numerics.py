"""Quadrature, entropy estimators, differentiation, and special functions.

Everything downstream (channels, bounds, rate curves) builds on the routines
here. All estimates are returned as :class:`EstimateWithError` so callers can
propagate tolerances instead of guessing them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sci_integrate
from scipy import special as _sci_special
from scipy.spatial import cKDTree

from .errors import (
    ConvergenceError,
    DegenerateSampleError,
    InputError,
    ParameterError,
)

# Below this density the p*log(p) integrand is treated as exactly zero.
PDF_FLOOR = 1e-300

_EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class EstimateWithError:
    """A numeric value together with a (one-sided) absolute error bound."""

    value: float
    abs_error: float
    method: str  # "quadrature" | "monte-carlo" | "analytic"

    def __post_init__(self):
        if self.method not in ("quadrature", "monte-carlo", "analytic"):
            raise ParameterError(f"unknown estimate method {self.method!r}")
        if not math.isfinite(self.value):
            raise InputError(f"estimate value is not finite: {self.value}")
        if self.abs_error < 0 or not math.isfinite(self.abs_error):
            raise InputError(f"abs_error must be finite and >= 0, got {self.abs_error}")
        if self.method == "analytic" and self.abs_error != 0.0:
            raise InputError("analytic estimates must carry abs_error = 0")


def analytic(value: float) -> EstimateWithError:
    return EstimateWithError(float(value), 0.0, "analytic")


def combined_tol(*estimates: EstimateWithError, factor: float = 3.0, floor: float = 1e-6) -> float:
    """Comparison tolerance: ``factor`` times the RSS of operand errors, floored."""
    rss = math.sqrt(sum(e.abs_error ** 2 for e in estimates))
    return max(floor, factor * rss)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a fixed quadrature rule."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str  # "gauss-hermite" | "adaptive-interval"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ParameterError("nodes and weights must be 1-d arrays of equal length")
        if np.any(weights <= 0):
            raise ParameterError("quadrature weights must all be positive")

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def expect_gaussian(self, f, mu: float = 0.0, var: float = 1.0) -> float:
        """E[f(Z)] for Z ~ N(mu, var), using a gauss-hermite rule."""
        if self.kind != "gauss-hermite":
            raise ParameterError("expect_gaussian requires a gauss-hermite rule")
        z = mu + math.sqrt(2.0 * var) * self.nodes
        return float(np.dot(self.weights, f(z))) / math.sqrt(math.pi)


def gauss_hermite(order: int) -> QuadratureRule:
    """Physicists' Gauss-Hermite rule: exact for deg <= 2*order-1 against e^{-x^2}.

    Orders 1..512 are supported (the one-point rule is the weight's own
    zeroth/first moment and is occasionally useful in tests).
    """
    if not isinstance(order, (int, np.integer)):
        raise ParameterError(f"order must be an integer, got {order!r}")
    if order < 1 or order > 512:
        raise ParameterError(f"gauss-hermite order out of range [1, 512]: {order}")
    nodes, weights = _sci_special.roots_hermite(int(order))
    # Beyond order ~350 the outermost weights underflow float64; those nodes
    # contribute < 1e-308 and are dropped to keep every stored weight positive.
    keep = weights > 0
    return QuadratureRule(nodes=nodes[keep], weights=weights[keep], kind="gauss-hermite")


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    breakpoints: Sequence[float] = (),
) -> EstimateWithError:
    """Adaptive integral of ``f`` over [a, b] (endpoints may be infinite).

    The reported ``abs_error`` is the adaptive estimator's bound; if it exceeds
    ``tol`` a :class:`ConvergenceError` carrying the best estimate is raised.
    ``breakpoints`` mark interior kinks/jumps of the integrand.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if not a < b:
        raise ParameterError(f"empty integration interval [{a}, {b}]")

    pts = sorted(p for p in breakpoints if a < p < b)
    # QUADPACK accepts interior break points only on finite intervals; split
    # manually when an endpoint is infinite.
    segments: list[tuple[float, float, list[float]]] = []
    if pts and (math.isinf(a) or math.isinf(b)):
        edges = [a, *pts, b]
        for lo, hi in zip(edges[:-1], edges[1:]):
            segments.append((lo, hi, []))
    else:
        segments.append((a, b, pts))

    total = 0.0
    err = 0.0
    for lo, hi, inner in segments:
        with np.errstate(over="ignore", invalid="ignore"), warnings.catch_warnings():
            # non-convergence is reported through abserr below
            warnings.simplefilter("ignore", _sci_integrate.IntegrationWarning)
            val, abserr = _sci_integrate.quad(
                f, lo, hi, epsabs=tol / max(1, len(segments)), epsrel=tol,
                limit=400, points=inner or None,
            )
        if not math.isfinite(val):
            raise InputError(f"integrand produced a non-finite integral on [{lo}, {hi}]")
        total += val
        err += abserr
    if err > max(tol, tol * abs(total)):
        raise ConvergenceError(
            f"integral did not reach tol={tol:g} (reported error {err:g})",
            estimate=total,
        )
    return EstimateWithError(total, err, "quadrature")


def entropy_from_pdf(
    pdf: Callable[[float], float],
    support: tuple[float, float],
    tol: float = 1e-9,
    breakpoints: Sequence[float] = (),
) -> EstimateWithError:
    """Differential entropy -∫ p log p in nats over ``support``.

    The pdf must integrate to 1 within ``10*tol`` over the support; densities
    below :data:`PDF_FLOOR` contribute zero to the integrand.
    """
    a, b = support
    mass = integrate(pdf, a, b, tol=max(tol, 1e-12), breakpoints=breakpoints)
    if abs(mass.value - 1.0) > 10 * tol + mass.abs_error:
        raise InputError(
            f"pdf integrates to {mass.value!r} over [{a}, {b}]; expected 1 within {10 * tol:g}"
        )

    def integrand(x: float) -> float:
        p = pdf(x)
        if p < PDF_FLOOR:
            return 0.0
        return -p * math.log(p)

    est = integrate(integrand, a, b, tol=tol, breakpoints=breakpoints)
    return EstimateWithError(est.value, est.abs_error + abs(mass.value - 1.0), "quadrature")


def knn_entropy(
    samples: np.ndarray,
    k: int = 4,
    seed: int = 0,
    n_bootstrap: int = 20,
) -> EstimateWithError:
    """Kozachenko-Leonenko nearest-neighbor differential entropy (nats).

    ``samples`` is (n,) or (n, d) with n >= 1000. ``abs_error`` is the
    bootstrap standard error (``n_bootstrap`` resamples of the per-point
    log-distance contributions, seeded by ``seed``).
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ParameterError("samples must be a 1-d or 2-d array")
    n, d = x.shape
    if n < 1000:
        raise ParameterError(f"need at least 1000 samples, got {n}")
    if k < 1:
        raise ParameterError("k must be >= 1")
    if k >= n:
        raise ParameterError("k must be smaller than the sample count")

    n_unique = np.unique(x, axis=0).shape[0]
    tie_fraction = 1.0 - n_unique / n
    if tie_fraction >= 0.01:
        raise DegenerateSampleError(
            f"{tie_fraction:.1%} of samples are exact ties; entropy estimate is degenerate"
        )

    tree = cKDTree(x)
    dist, _ = tree.query(x, k=k + 1, workers=-1)
    radii = dist[:, k]
    positive = radii > 0
    if not np.all(positive):
        # ties below the 1% threshold: drop the affected points
        radii = radii[positive]
    m = radii.size

    log_vd = (d / 2) * math.log(math.pi) - math.lgamma(d / 2 + 1)
    contrib = d * np.log(radii)
    value = float(np.mean(contrib)) + _sci_special.digamma(m) - _sci_special.digamma(k) + log_vd

    rng = np.random.default_rng(np.uint64(seed))
    boot = np.empty(n_bootstrap)
    for i in range(n_bootstrap):
        idx = rng.integers(0, m, size=m)
        boot[i] = contrib[idx].mean()
    abs_error = float(np.std(boot, ddof=1))
    return EstimateWithError(float(value), abs_error, "monte-carlo")


def central_diff(f: Callable[[float], float], y: float, h: float) -> float:
    """Symmetric difference (f(y+h) - f(y-h)) / (2h)."""
    if h <= 0:
        raise ParameterError("step h must be positive")
    hi = f(y + h)
    lo = f(y - h)
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise InputError(f"function not finite at {y} +/- {h}")
    return (hi - lo) / (2.0 * h)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if x <= 0:
        raise ParameterError(f"log_gamma requires x > 0, got {x}")
    return float(_sci_special.gammaln(x))


def digamma(x: float) -> float:
    """Derivative of log Gamma at x > 0."""
    if x <= 0:
        raise ParameterError(f"digamma requires x > 0, got {x}")
    return float(_sci_special.digamma(x))
