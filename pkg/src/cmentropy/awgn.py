"""Posterior statistics and h(E[X|Y]) for the scalar channel Y = X + W.

W is zero-mean Gaussian with variance ``noise_var``, independent of X. All
pointwise quantities (marginal density, conditional mean/variance, score)
come from one family of convolution integrals

    I_k(y) = ∫ s^k p_X(s) φ_W(y - s) ds,      k = 0, 1, 2,

evaluated by Gauss-Legendre panels that are split at every pdf breakpoint and
sized against both the input's smooth feature scale and the noise scale. The
same integrals evaluated on a panel grid over y drive every expectation over
the output. h(E[X|Y]) itself uses the identity

    h(E[X|Y]) = h(Y) + E[log Var(X|Y)] - log σ_W²,

with an independent sample-and-estimate route available as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .distributions import InputDistribution
from .errors import FarTailError, ParameterError
from .numerics import EstimateWithError, knn_entropy

# Gaussian factor is below 1e-39 of its peak beyond this many noise sigmas.
NOISE_RADIUS = 13.4
# |y - mu_Y| beyond this many sigma_Y is excluded from posterior evaluation.
FAR_TAIL_SIGMAS = 10.0
# Var(X|Y) values below this floor are clipped inside E[log Var(X|Y)].
COND_VAR_FLOOR = 1e-150
_DENSITY_FLOOR = 1e-300
# matrices larger than this many elements are processed in row chunks
_CHUNK_ELEMS = 4_000_000
_MATRIX_MAX_NODES = 6000


@dataclass(frozen=True)
class ScalarChannel:
    """An input law observed through additive Gaussian noise."""

    input: InputDistribution
    noise_var: float

    def __post_init__(self):
        if self.noise_var <= 0 or not math.isfinite(self.noise_var):
            raise ParameterError(f"noise variance must be positive, got {self.noise_var}")
        if not math.isfinite(self.input.variance):
            raise ParameterError("input variance must be finite")

    @property
    def noise_sigma(self) -> float:
        return math.sqrt(self.noise_var)

    @property
    def output_mean(self) -> float:
        return self.input.mean

    @property
    def output_var(self) -> float:
        return self.input.variance + self.noise_var

    @property
    def output_sigma(self) -> float:
        return math.sqrt(self.output_var)


@dataclass(frozen=True)
class PosteriorPoint:
    """Observation-conditional statistics at a single y."""

    y: float
    density: float
    score: float
    cond_mean: float
    cond_var: float


@dataclass(frozen=True)
class EntropyReport:
    """Entropies, second-order statistics, and all scalar bounds for a channel."""

    h_x: EstimateWithError
    h_y: EstimateWithError
    h_cond_mean: EstimateWithError
    mmse: EstimateWithError
    var_cond_mean: EstimateWithError
    e_log_cond_var: EstimateWithError
    lower_main: EstimateWithError
    ub_jensen: EstimateWithError
    ub_linear: EstimateWithError
    ub_maxent: EstimateWithError
    floor_hits: int


def _panels(segments: Iterable[tuple[float, float, float]], order: int):
    """Gauss-Legendre nodes/weights over segments of (lo, hi, max_panel_len)."""
    base_x, base_w = leggauss(order)
    nodes, weights = [], []
    for lo, hi, max_len in segments:
        if hi <= lo:
            continue
        n = max(1, int(math.ceil((hi - lo) / max_len)))
        edges = np.linspace(lo, hi, n + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes.append((mid[:, None] + half[:, None] * base_x[None, :]).ravel())
        weights.append((half[:, None] * base_w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _split_at(lo: float, hi: float, cuts: Iterable[float], max_len: float):
    points = [lo] + sorted(c for c in set(cuts) if lo < c < hi) + [hi]
    return [(a, b, max_len) for a, b in zip(points[:-1], points[1:])]


def _refined_segments(lo, hi, base_len, centers, radius, fine_len):
    """Base panels everywhere, finer panels within ``radius`` of each center."""
    cuts = {lo, hi}
    fine: list[tuple[float, float]] = []
    for c in centers:
        a, b = max(lo, c - radius), min(hi, c + radius)
        if a < b:
            fine.append((a, b))
            cuts.update((a, b))
    points = sorted(cuts)
    segs = []
    for a, b in zip(points[:-1], points[1:]):
        is_fine = any(fa <= a and b <= fb for fa, fb in fine)
        segs.append((a, b, fine_len if is_fine else base_len))
    return segs


class _ChannelCore:
    """Cached quadrature rules for one channel, at two resolutions."""

    def __init__(self, ch: ScalarChannel):
        self.ch = ch
        d = ch.input
        sw = ch.noise_sigma
        self.scale = min(d.smooth_scale, sw)
        s_lo, s_hi = d.trunc

        fine_len = self.scale / 1.5
        coarse_len = self.scale / 1.0
        est_nodes = (s_hi - s_lo) / fine_len * 16
        self.matrix_mode = est_nodes <= _MATRIX_MAX_NODES
        if self.matrix_mode:
            self.s_rules = {
                "fine": self._input_rule(fine_len, 16),
                "coarse": self._input_rule(coarse_len, 10),
            }

        y_lo = s_lo - NOISE_RADIUS * sw
        y_hi = s_hi + NOISE_RADIUS * sw
        base_scale = min(ch.output_sigma, math.sqrt(d.smooth_scale ** 2 + sw * sw))
        self.y_rules = {
            "fine": _panels(
                _refined_segments(y_lo, y_hi, base_scale / 1.5, d.breakpoints,
                                  (NOISE_RADIUS + 1) * sw, sw / 1.5),
                16,
            ),
            "coarse": _panels(
                _refined_segments(y_lo, y_hi, base_scale / 1.0, d.breakpoints,
                                  (NOISE_RADIUS + 1) * sw, sw / 1.0),
                10,
            ),
        }

    def _input_rule(self, max_len: float, order: int):
        d = self.ch.input
        s, w = _panels(_split_at(d.trunc[0], d.trunc[1], d.breakpoints, max_len), order)
        return s, w * np.asarray(d.pdf(s), dtype=float)

    def stats(self, ys: np.ndarray, level: str = "fine",
              need_var: bool = True, need_score: bool = True):
        """(density, cond_mean, cond_var, score) arrays at the given y values."""
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        if self.matrix_mode:
            return self._stats_matrix(ys, level, need_var, need_score)
        return self._stats_per_y(ys, level, need_var, need_score)

    def _stats_matrix(self, ys, level, need_var, need_score):
        s, u = self.s_rules[level]
        sw = self.ch.noise_sigma
        n = ys.size
        p = np.empty(n)
        mean = np.empty(n)
        var = np.empty(n) if need_var else None
        score = np.empty(n) if need_score else None
        rows = max(1, _CHUNK_ELEMS // s.size)
        norm = 1.0 / (sw * math.sqrt(2 * math.pi))
        for i0 in range(0, n, rows):
            yb = ys[i0:i0 + rows]
            z = (yb[:, None] - s[None, :]) / sw
            g = np.exp(-0.5 * z * z) * (u[None, :] * norm)
            pb = g.sum(axis=1)
            safe = np.maximum(pb, _DENSITY_FLOOR)
            mb = (g @ s) / safe
            p[i0:i0 + rows] = pb
            mean[i0:i0 + rows] = mb
            if need_var:
                dev = s[None, :] - mb[:, None]
                var[i0:i0 + rows] = np.einsum("ij,ij->i", g, dev * dev) / safe
            if need_score:
                score[i0:i0 + rows] = np.einsum("ij,ij->i", g, -z / sw) / safe
        return p, mean, var, score

    def _stats_per_y(self, ys, level, need_var, need_score):
        d = self.ch.input
        sw = self.ch.noise_sigma
        s_lo, s_hi = d.trunc
        max_len = self.scale / (1.5 if level == "fine" else 1.0)
        order = 16 if level == "fine" else 10
        radius = NOISE_RADIUS * sw
        norm = 1.0 / (sw * math.sqrt(2 * math.pi))
        n = ys.size
        p = np.zeros(n)
        mean = np.full(n, np.nan)
        var = np.full(n, np.nan) if need_var else None
        score = np.full(n, np.nan) if need_score else None
        for i, y in enumerate(ys):
            w_lo = max(-radius, y - s_hi)
            w_hi = min(radius, y - s_lo)
            if w_lo >= w_hi:
                continue
            cuts = [y - b for b in d.breakpoints]
            w, wt = _panels(_split_at(w_lo, w_hi, cuts, max_len), order)
            s = y - w
            g = wt * np.asarray(d.pdf(s), dtype=float) * np.exp(-0.5 * (w / sw) ** 2) * norm
            pi = g.sum()
            p[i] = pi
            safe = max(pi, _DENSITY_FLOOR)
            mi = float(g @ s) / safe
            mean[i] = mi
            if need_var:
                var[i] = float(g @ (s - mi) ** 2) / safe
            if need_score:
                score[i] = float(g @ (-w / (sw * sw))) / safe
        return p, mean, var, score


@lru_cache(maxsize=128)
def _core(ch: ScalarChannel) -> _ChannelCore:
    return _ChannelCore(ch)


def _tail_guard(ch: ScalarChannel, y: float):
    lo = ch.output_mean - FAR_TAIL_SIGMAS * ch.output_sigma
    hi = ch.output_mean + FAR_TAIL_SIGMAS * ch.output_sigma
    if not lo <= y <= hi:
        raise FarTailError(
            f"y={y:g} lies beyond the usable range [{lo:g}, {hi:g}] "
            f"(+/-{FAR_TAIL_SIGMAS:g} output sigmas)"
        )


def marginal_pdf(ch: ScalarChannel, y: float, return_flag: bool = False):
    """p_Y(y) = ∫ p_X(s) φ_W(y−s) ds; floored at 1e-300 with a far-tail flag."""
    p, _, _, _ = _core(ch).stats(np.asarray([y]), need_var=False, need_score=False)
    value = float(p[0])
    far = value < _DENSITY_FLOOR or abs(y - ch.output_mean) > FAR_TAIL_SIGMAS * ch.output_sigma
    value = max(value, _DENSITY_FLOOR)
    if return_flag:
        return value, far
    return value


def posterior_point(ch: ScalarChannel, y: float) -> PosteriorPoint:
    """Marginal density, score, E[X|Y=y], Var(X|Y=y) at one observation."""
    _tail_guard(ch, y)
    p, mean, var, score = _core(ch).stats(np.asarray([float(y)]))
    if p[0] < _DENSITY_FLOOR:
        raise FarTailError(f"marginal density underflows at y={y:g}")
    point = PosteriorPoint(
        y=float(y), density=float(p[0]), score=float(score[0]),
        cond_mean=float(mean[0]), cond_var=float(var[0]),
    )
    # enforce the score identity cond_mean = y + noise_var * score
    resid = abs(point.cond_mean - (y + ch.noise_var * point.score))
    if resid > 1e-8 * (1 + abs(point.cond_mean)):
        raise ParameterError(
            f"posterior mean / score inconsistency at y={y:g}: residual {resid:g}"
        )
    return point


def _expect(ch: ScalarChannel, integrand, level: str, need_var=True, need_score=False):
    """∫ p_Y(y) g(...) dy over the output window at one resolution."""
    core = _core(ch)
    t, v = core.y_rules[level]
    p, mean, var, score = core.stats(t, level=level, need_var=need_var,
                                     need_score=need_score)
    g = integrand(t, p, mean, var, score)
    return float(np.dot(v, g))


def _expect_with_error(ch, integrand, need_var=True) -> EstimateWithError:
    fine = _expect(ch, integrand, "fine", need_var=need_var)
    coarse = _expect(ch, integrand, "coarse", need_var=need_var)
    return EstimateWithError(fine, abs(fine - coarse) + 1e-10, "quadrature")


def mmse(ch: ScalarChannel) -> EstimateWithError:
    """E[Var(X|Y)], the minimum mean-squared error."""
    return _expect_with_error(ch, lambda t, p, m, v, s: p * v)


def var_cond_mean(ch: ScalarChannel) -> EstimateWithError:
    """Var(E[X|Y]) by direct quadrature (not via the total-variance identity)."""

    def integrand(t, p, m, v, s):
        return p * (m - ch.input.mean) ** 2

    return _expect_with_error(ch, integrand)


def output_entropy(ch: ScalarChannel) -> EstimateWithError:
    """h(Y) over a window that carries all but ~1e-13 of the output mass."""

    def integrand(t, p, m, v, s):
        logp = np.log(np.maximum(p, _DENSITY_FLOOR))
        return np.where(p > _DENSITY_FLOOR, -p * logp, 0.0)

    return _expect_with_error(ch, integrand, need_var=False)


def e_log_cond_var(ch: ScalarChannel) -> tuple[EstimateWithError, int]:
    """E[log Var(X|Y)] plus the count of floor-clipped variance evaluations."""
    floor_hits = 0

    def integrand(t, p, m, v, s):
        nonlocal floor_hits
        floor_hits += int(np.sum(v < COND_VAR_FLOOR))
        return p * np.log(np.maximum(v, COND_VAR_FLOOR))

    fine = _expect(ch, integrand, "fine")
    hits = floor_hits
    coarse = _expect(ch, integrand, "coarse")
    est = EstimateWithError(fine, abs(fine - coarse) + 1e-10, "quadrature")
    return est, hits


def entropy_cond_mean(ch: ScalarChannel) -> EstimateWithError:
    """h(E[X|Y]) = h(Y) + E[log Var(X|Y)] − log σ_W²."""
    if ch.input.variance <= 0:
        raise ParameterError("degenerate input: h(E[X|Y]) undefined")
    h_y = output_entropy(ch)
    elv, _ = e_log_cond_var(ch)
    value = h_y.value + elv.value - math.log(ch.noise_var)
    err = math.hypot(h_y.abs_error, elv.abs_error)
    return EstimateWithError(value, err, "quadrature")


def cond_mean_map(ch: ScalarChannel, ys: np.ndarray) -> np.ndarray:
    """Vectorized y ↦ E[X|Y=y] (used by the sampling oracle and vector module)."""
    _, mean, _, _ = _core(ch).stats(np.asarray(ys, dtype=float),
                                    need_var=False, need_score=False)
    return mean


def entropy_cond_mean_sampled(ch: ScalarChannel, n_samples: int, seed: int) -> EstimateWithError:
    """Independent route to h(E[X|Y]): sample Y, map through the posterior mean,
    and estimate the entropy of the mapped sample with the k-NN estimator."""
    if n_samples < 100_000:
        raise ParameterError("need at least 1e5 samples for a stable estimate")
    x = ch.input.sample(n_samples, seed)
    rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15))
    y = x + ch.noise_sigma * rng.standard_normal(n_samples)
    mapped = cond_mean_map(ch, y)
    return knn_entropy(mapped, k=4, seed=seed)


def entropy_report(ch: ScalarChannel) -> EntropyReport:
    """All entropies and the four scalar bounds for one channel."""
    h_x = ch.input.entropy()
    h_y = output_entropy(ch)
    elv, floor_hits = e_log_cond_var(ch)
    h_cm = EstimateWithError(
        h_y.value + elv.value - math.log(ch.noise_var),
        math.hypot(h_y.abs_error, elv.abs_error),
        "quadrature",
    )
    mm = mmse(ch)
    vcm = var_cond_mean(ch)
    sx2, sw2 = ch.input.variance, ch.noise_var
    lower_main = EstimateWithError(
        2 * h_x.value - h_y.value, math.hypot(2 * h_x.abs_error, h_y.abs_error), "quadrature")
    ub_jensen = EstimateWithError(
        h_y.value + math.log(mm.value / sw2),
        math.hypot(h_y.abs_error, mm.abs_error / mm.value), "quadrature")
    ub_linear = EstimateWithError(
        h_y.value + math.log(sx2 / (sx2 + sw2)), h_y.abs_error, "quadrature")
    ub_maxent = EstimateWithError(
        0.5 * math.log(2 * math.pi * math.e * sx2 * sx2 / (sx2 + sw2)), 0.0, "analytic")
    return EntropyReport(
        h_x=h_x, h_y=h_y, h_cond_mean=h_cm, mmse=mm, var_cond_mean=vcm,
        e_log_cond_var=elv, lower_main=lower_main, ub_jensen=ub_jensen,
        ub_linear=ub_linear, ub_maxent=ub_maxent, floor_hits=floor_hits,
    )


def entropy_power(h: float) -> float:
    """N = e^{2h} / (2πe)."""
    return math.exp(2 * h) / (2 * math.pi * math.e)
