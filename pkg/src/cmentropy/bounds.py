"""Scalar bounds, approximations, and asymptotics for h(E[X|Y]).

Everything here is evaluated from independently computed h(X), h(Y), mmse,
and E[log Var(X|Y)] quantities rather than algebraically rearranged from the
truth pipeline, so equality tests remain genuine cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .awgn import (
    ScalarChannel,
    e_log_cond_var,
    entropy_cond_mean,
    entropy_power,
    mmse,
    output_entropy,
    var_cond_mean,
)
from .distributions import InputDistribution
from .errors import ParameterError
from .numerics import EstimateWithError, combined_tol


@dataclass(frozen=True)
class BoundsReport:
    """Truth plus the four scalar bounds, with truth-minus-bound gaps."""

    truth: EstimateWithError
    lower_main: EstimateWithError
    ub_jensen: EstimateWithError
    ub_linear: EstimateWithError
    ub_maxent: EstimateWithError

    @property
    def gaps(self) -> dict[str, float]:
        t = self.truth.value
        return {
            "lower_main": t - self.lower_main.value,
            "ub_jensen": t - self.ub_jensen.value,
            "ub_linear": t - self.ub_linear.value,
            "ub_maxent": t - self.ub_maxent.value,
        }

    def tolerance(self) -> float:
        return combined_tol(self.truth, self.lower_main, self.ub_jensen,
                            self.ub_linear, self.ub_maxent)


@dataclass(frozen=True)
class EPIComparison:
    """Two lower bounds on the output entropy power N(Y_alpha) for Y_alpha = X + alpha W."""

    alpha: float
    n_y_alpha: float
    lb_main: float
    lb_costa: float
    n_y_alpha_err: float = 0.0
    lb_main_err: float = 0.0
    lb_costa_err: float = 0.0

    @property
    def gap_main(self) -> float:
        return self.n_y_alpha - self.lb_main

    @property
    def gap_costa(self) -> float:
        return self.n_y_alpha - self.lb_costa

    @property
    def gap_main_err(self) -> float:
        return math.hypot(self.n_y_alpha_err, self.lb_main_err)

    @property
    def gap_costa_err(self) -> float:
        return math.hypot(self.n_y_alpha_err, self.lb_costa_err)


def bounds_report(ch: ScalarChannel) -> BoundsReport:
    """Evaluate the main lower bound and the three upper bounds against truth."""
    h_x = ch.input.entropy()
    h_y = output_entropy(ch)
    mm = mmse(ch)
    truth = entropy_cond_mean(ch)
    sx2, sw2 = ch.input.variance, ch.noise_var
    lower_main = EstimateWithError(
        2 * h_x.value - h_y.value,
        math.hypot(2 * h_x.abs_error, h_y.abs_error), "quadrature")
    ub_jensen = EstimateWithError(
        h_y.value + math.log(mm.value / sw2),
        math.hypot(h_y.abs_error, mm.abs_error / mm.value), "quadrature")
    ub_linear = EstimateWithError(
        h_y.value + math.log(sx2 / (sx2 + sw2)), h_y.abs_error, "quadrature")
    ub_maxent = EstimateWithError(
        0.5 * math.log(2 * math.pi * math.e * sx2 * sx2 / (sx2 + sw2)), 0.0, "analytic")
    return BoundsReport(truth=truth, lower_main=lower_main, ub_jensen=ub_jensen,
                        ub_linear=ub_linear, ub_maxent=ub_maxent)


def fisher_bounds(ch: ScalarChannel) -> tuple[float, float]:
    """Lower bounds on J(E[X|Y]).

    Returns ``(j_truth_lb, j_closed)`` where ``j_truth_lb = 1/N(E[X|Y])``
    (reciprocal entropy power of the computed truth) and ``j_closed`` is the
    closed-form floor (σ_X² + σ_W²) / σ_X⁴; the former dominates, with
    equality for Gaussian inputs.
    """
    truth = entropy_cond_mean(ch)
    j_truth_lb = 1.0 / entropy_power(truth.value)
    sx2 = ch.input.variance
    j_closed = (sx2 + ch.noise_var) / (sx2 * sx2)
    return j_truth_lb, j_closed


def taylor_approx(ch: ScalarChannel) -> float:
    """Second-order expansion of h(E[X|Y]) about E[log Var] ≈ log mmse.

    h(Y) + log(mmse/σ_W²) − c₂/(2·mmse²) with c₂ = Var(Var(X|Y)). The
    third-order remainder involves an unconstructible mean-value point and is
    not computed.
    """
    h_y = output_entropy(ch).value
    mm = mmse(ch).value
    c2 = _var_of_cond_var(ch, mm)
    return h_y + math.log(mm / ch.noise_var) - c2 / (2 * mm * mm)


def _var_of_cond_var(ch: ScalarChannel, mm: float) -> float:
    from .awgn import _core  # shared cached quadrature grids

    core = _core(ch)
    t, v = core.y_rules["fine"]
    p, _, var, _ = core.stats(t, level="fine", need_score=False)
    return float(np.dot(v, p * (var - mm) ** 2))


def asymptotic_ratio_low_var(
    family: Callable[[float], InputDistribution],
    var_grid: Sequence[float],
    noise_var: float,
) -> list[float]:
    """h(E[X|Y]) / log σ_X² along a decreasing grid of input variances.

    The ratio tends to 1 (slowly: the offset is the ½log(2πe/σ_W²) constant),
    which callers monitor rather than assert tightly.
    """
    grid = list(var_grid)
    if any(v >= noise_var for v in grid):
        raise ParameterError("low-variance grid must stay below the noise variance")
    if any(grid[i] <= grid[i + 1] for i in range(len(grid) - 1)):
        raise ParameterError("variance grid must be strictly decreasing")
    out = []
    for var in grid:
        ch = ScalarChannel(family(var), noise_var)
        out.append(entropy_cond_mean(ch).value / math.log(var))
    return out


def costa_comparison(
    input_dist: InputDistribution, noise_var: float, alpha: float
) -> EPIComparison:
    """Compare two entropy-power lower bounds for Y_alpha = X + alpha W.

    ``lb_main`` is α²σ_W²·N(X)·exp(−E[log Var(X|Y_α)]) (from the main
    conditional-mean bound) and ``lb_costa`` is the concavity bound
    (1−α²)N(X) + α²N(Y₁).
    """
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    ch_alpha = ScalarChannel(input_dist, alpha * alpha * noise_var)
    ch_one = ScalarChannel(input_dist, noise_var)
    h_x = input_dist.entropy()
    n_x = entropy_power(h_x.value)
    h_y_alpha = output_entropy(ch_alpha)
    n_y_alpha = entropy_power(h_y_alpha.value)
    if alpha == 1.0:
        n_y_one, n_y_one_err = n_y_alpha, 2 * n_y_alpha * h_y_alpha.abs_error
    else:
        h_y_one = output_entropy(ch_one)
        n_y_one = entropy_power(h_y_one.value)
        n_y_one_err = 2 * n_y_one * h_y_one.abs_error
    elv, _ = e_log_cond_var(ch_alpha)
    lb_main = alpha * alpha * noise_var * n_x * math.exp(-elv.value)
    lb_costa = (1 - alpha * alpha) * n_x + alpha * alpha * n_y_one
    n_x_err = 2 * n_x * h_x.abs_error
    return EPIComparison(
        alpha=alpha, n_y_alpha=n_y_alpha, lb_main=lb_main, lb_costa=lb_costa,
        n_y_alpha_err=2 * n_y_alpha * h_y_alpha.abs_error,
        lb_main_err=lb_main * math.hypot(2 * h_x.abs_error, elv.abs_error),
        lb_costa_err=math.hypot((1 - alpha * alpha) * n_x_err,
                                alpha * alpha * n_y_one_err),
    )
