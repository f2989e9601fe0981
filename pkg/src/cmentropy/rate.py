"""Remote source coding lower bounds and CEO rate-loss bounds.

All rates are in nats. Every bound carries an explicit validity window in the
distortion D; outside its window a bound is *absent* (``None`` in curve
records) or raises :class:`DistortionDomainError` for the single-point
operations, matching each operation's contract. The M→∞ forms are separate
closed-form code paths rather than large-M evaluations, which avoids
catastrophic cancellation in (M/2)·log(1 + x/M).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .awgn import ScalarChannel, entropy_cond_mean, entropy_power, mmse, output_entropy
from .distributions import InputDistribution, fisher_information
from .errors import (
    ConvergenceError,
    DistortionDomainError,
    ParameterError,
    UnsupportedInputError,
)
from .numerics import EstimateWithError

RATE_CURVE_COLUMNS = (
    "D", "remote_lb1", "remote_lb2", "coop_tight", "coop_weak", "ceo_ub",
    "loss_lb", "loss_ub_thm9", "loss_ub_thm10", "loss_ub_prev", "loss_gauss_exact",
)


@dataclass(frozen=True)
class CEOSetting:
    """One source observed by M agents through independent Gaussian noises."""

    input: InputDistribution
    noise_var: float
    agents: float  # integer >= 1, or math.inf

    def __post_init__(self):
        if self.noise_var <= 0:
            raise ParameterError(f"noise variance must be positive, got {self.noise_var}")
        if self.agents != math.inf:
            if self.agents < 1 or int(self.agents) != self.agents:
                raise ParameterError(f"agent count must be a positive integer or inf, got {self.agents}")

    @property
    def avg_channel(self) -> ScalarChannel:
        """Y(M) = X + (1/M)ΣW_i, i.e. noise variance σ_W²/M."""
        if self.agents == math.inf:
            raise ParameterError("the averaged channel is undefined at M = inf")
        return ScalarChannel(self.input, self.noise_var / self.agents)


@dataclass(frozen=True)
class _Stats:
    sx2: float
    n_x: float
    n_y: float
    n_cm: float
    mmse: float
    sy2: float


@lru_cache(maxsize=256)
def _channel_stats(ch: ScalarChannel) -> _Stats:
    return _Stats(
        sx2=ch.input.variance,
        n_x=entropy_power(ch.input.entropy().value),
        n_y=entropy_power(output_entropy(ch).value),
        n_cm=entropy_power(entropy_cond_mean(ch).value),
        mmse=mmse(ch).value,
        sy2=ch.output_var,
    )


def _log_plus(x: float) -> float:
    return max(0.0, math.log(x)) if x > 0 else 0.0


def remote_lower_bounds(ch: ScalarChannel, distortion: float) -> tuple[float, float]:
    """The two lower bounds on the remote rate-distortion function at D.

    Valid for D > mmse(X|Y); the first always dominates the second, with
    equality exactly for Gaussian inputs. Each bound is the log⁺ of a single
    merged ratio: clamping the two log factors separately is not value-safe
    (the clamped sum exceeds the exact Gaussian remote rate whenever
    D ≥ N(E[X|Y])), so the product is formed before the clamp. The shift in
    the denominator is N(X)σ_W²/N(Y) = N(X|Y), a conditional-entropy-power
    stand-in for the mmse.
    """
    st = _channel_stats(ch)
    if distortion <= st.mmse:
        raise DistortionDomainError(
            f"remote bounds need D > mmse = {st.mmse:.6g}, got D = {distortion:.6g}"
        )
    shift = st.n_x * ch.noise_var / st.n_y
    lb1 = 0.5 * _log_plus(st.n_cm / (distortion - shift))
    lb2 = 0.5 * _log_plus((st.n_x * st.n_x / st.n_y) / (distortion - shift))
    return lb1, lb2


def _finite_setting_stats(setting: CEOSetting) -> _Stats:
    return _channel_stats(setting.avg_channel)


def coop_bounds(setting: CEOSetting, distortion: float) -> tuple[float, float]:
    """Lower bounds on the fully-cooperative (remote, noise σ_W²/M) rate.

    ``tight`` is ½log⁺[N(E[X|Y(M)])/(D − mmse)]; ``weak`` replaces the mmse
    by its conditional-entropy-power floor N(X)σ_W²/(M·N(Y(M))), so it never
    exceeds ``tight``. At M = inf the weak form degenerates to ½log⁺(N(X)/D).
    """
    if setting.agents == math.inf:
        if distortion <= 0:
            raise DistortionDomainError("distortion must be positive")
        n_x = entropy_power(setting.input.entropy().value)
        weak = 0.5 * _log_plus(n_x / distortion)
        return weak, weak
    st = _finite_setting_stats(setting)
    m = setting.agents
    if distortion <= st.mmse:
        raise DistortionDomainError(
            f"tight cooperation bound needs D > mmse(X|Y(M)) = {st.mmse:.6g}, "
            f"got D = {distortion:.6g}"
        )
    tight = 0.5 * _log_plus(st.n_cm / (distortion - st.mmse))
    weak = _coop_weak(setting, distortion)
    return tight, weak


def _coop_weak(setting: CEOSetting, distortion: float) -> float:
    """Weak cooperation bound alone; valid on D > N(X)σ_W²/(M·N(Y(M)))."""
    st = _finite_setting_stats(setting)
    shrink = setting.noise_var * st.n_x / (setting.agents * st.n_y)
    if distortion <= shrink:
        raise DistortionDomainError(
            f"weak cooperation bound needs D > {shrink:.6g}, got D = {distortion:.6g}"
        )
    return 0.5 * _log_plus(st.n_cm / (distortion - shrink))


def ceo_sum_rate_ub(setting: CEOSetting, distortion: float) -> float:
    """Upper bound on the CEO sum-rate at distortion D; zero for D >= σ_X²."""
    sx2 = setting.input.variance
    sw2 = setting.noise_var
    m = setting.agents
    if m == math.inf:
        if distortion <= 0:
            raise DistortionDomainError("distortion must be positive")
        if distortion >= sx2:
            return 0.0
        return 0.5 * math.log(sx2 / distortion) + 0.5 * sw2 * (1 / distortion - 1 / sx2)
    floor = sx2 * sw2 / (m * sx2 + sw2)
    if distortion <= floor:
        raise DistortionDomainError(
            f"CEO upper bound needs D > {floor:.6g}, got D = {distortion:.6g}"
        )
    if distortion >= sx2:
        return 0.0
    penalty = (sw2 / m) * (1 / sx2 - 1 / distortion)
    return 0.5 * math.log(sx2 / distortion) - (m / 2) * math.log1p(penalty)


@dataclass(frozen=True)
class RateLossBounds:
    """Bounds on L(D); fields are None outside their validity window."""

    lb: float | None
    ub_thm9: float | None
    ub_thm10: float | None
    ub_prev: float | None
    gauss_exact: float | None
    absent_reasons: dict[str, str]


def rate_loss_bounds(setting: CEOSetting, distortion: float) -> RateLossBounds:
    """Every finite-M rate-loss bound applicable at distortion D."""
    if setting.agents == math.inf:
        raise ParameterError("use rate_loss_asymptotic for the M = inf forms")
    st = _finite_setting_stats(setting)
    m = setting.agents
    sx2, sw2 = st.sx2, setting.noise_var
    d = distortion
    reasons: dict[str, str] = {}

    gauss_floor = sx2 * sw2 / (m * sx2 + sw2)
    z = (sw2 / m) * (1 / d - 1 / sx2)  # z < 1 iff D > gauss_floor
    per_agent = -math.log1p(-z) if z < 1 else math.inf

    def in_window(name: str, lo: float, hi: float) -> bool:
        if not lo < d < hi:
            reasons[name] = f"valid window is ({lo:.6g}, {hi:.6g})"
            return False
        return True

    gauss_exact = None
    if in_window("gauss_exact", gauss_floor, sx2):
        gauss_exact = ((m - 1) / 2) * per_agent

    ub_thm10 = None
    lo10 = max(st.mmse, gauss_floor)
    if in_window("ub_thm10", lo10, sx2):
        tail = (m / 2) * per_agent
        if d < st.mmse + st.n_cm:
            ub_thm10 = (0.5 * math.log(sx2 / st.n_cm)
                        + 0.5 * math.log1p(-st.mmse / d) + tail)
        else:
            ub_thm10 = 0.5 * math.log(sx2 / d) + tail

    # CEO upper bound minus the weak cooperation bound. The merged factor
    # (1 - shrink/D) is kept on the whole window: splitting at D = N(E) and
    # clamping the first cooperation term would push the subtracted rate above
    # the exact Gaussian remote rate, making this difference under-shoot the
    # true loss (it would dip below the exact Gaussian loss).
    ub_thm9 = None
    if in_window("ub_thm9", gauss_floor, sx2):
        shrink_factor = 1.0 - sw2 * st.n_x / (m * d * st.n_y)
        ub_thm9 = 0.5 * math.log((sx2 / st.n_cm) * shrink_factor) + (m / 2) * per_agent

    ub_prev = None
    if in_window("ub_prev", gauss_floor, sx2):
        inflate = (1 / d - 1 / sx2) * (d + 2 * math.sqrt(d) * math.sqrt(sw2) + sw2 / m)
        ub_prev = ((m - 1) / 2) * per_agent + 0.5 * math.log1p(inflate / (1 - z))

    lb = None
    lb_hi = st.n_x * (sw2 / m) / (st.n_y - st.n_x)
    if in_window("lb", gauss_floor, min(lb_hi, sx2)):
        coop_part = (m / 2) * math.log(1.0 / (st.n_y / st.n_x - sw2 / (m * d)))
        lb = coop_part - 0.5 * math.log(sx2 / st.n_x) + 0.5 * math.log1p(-z)

    return RateLossBounds(lb=lb, ub_thm9=ub_thm9, ub_thm10=ub_thm10,
                          ub_prev=ub_prev, gauss_exact=gauss_exact,
                          absent_reasons=reasons)


def rate_loss_asymptotic(
    input_dist: InputDistribution, noise_var: float, distortion: float
) -> tuple[float | None, float, float]:
    """The M→∞ rate-loss expressions (lb, ub, previous ub) at distortion D.

    The lower bound needs 0 < D < 1/J(X) and is None beyond that; the upper
    bounds need 0 < D < σ_X².
    """
    sx2 = input_dist.variance
    n_x = entropy_power(input_dist.entropy().value)
    try:
        j_x = fisher_information(input_dist).value
    except ConvergenceError as exc:
        raise UnsupportedInputError(
            f"{input_dist.name!r} lacks the regularity for the asymptotic loss bounds: {exc}"
        ) from exc
    if not 0 < distortion < sx2:
        raise DistortionDomainError(
            f"asymptotic loss bounds need 0 < D < σ_X² = {sx2:.6g}, got {distortion:.6g}"
        )
    lb_inf = None
    if distortion < 1 / j_x:
        lb_inf = 0.5 * noise_var * (1 / distortion - j_x) - 0.5 * math.log(sx2 / n_x)
    spread = 0.5 * noise_var * (1 / distortion - 1 / sx2)
    if distortion < n_x:
        ub_inf = 0.5 * math.log(sx2 / n_x) + spread
    else:
        ub_inf = 0.5 * math.log(sx2 / distortion) + spread
    ub_prev_inf = spread + 0.5 * math.log1p(
        (1 / distortion - 1 / sx2) * (distortion + 2 * math.sqrt(distortion * noise_var))
    )
    return lb_inf, ub_inf, ub_prev_inf


def kappa(input_dist: InputDistribution) -> EstimateWithError:
    """κ = N(X)·J(X), the small-smoothing derivative of the entropy power.

    Cross-checked against the defining limit d/ds N(X+√s·G) at s ∈ {1e-3,
    1e-4} with Richardson extrapolation; the discrepancy is reported as the
    estimate's ``abs_error``.
    """
    try:
        j_x = fisher_information(input_dist)
    except ConvergenceError as exc:
        raise UnsupportedInputError(
            f"kappa({input_dist.name!r}) needs finite Fisher information: {exc}"
        ) from exc
    n_x = entropy_power(input_dist.entropy().value)
    value = n_x * j_x.value

    def n_smoothed(s: float) -> float:
        return entropy_power(output_entropy(ScalarChannel(input_dist, s)).value)

    s1, s2 = 1e-3, 1e-4
    d1 = (n_smoothed(s1) - n_x) / s1
    d2 = (n_smoothed(s2) - n_x) / s2
    fd_limit = (s1 * d2 - s2 * d1) / (s1 - s2)
    return EstimateWithError(value, abs(value - fd_limit), "quadrature")


def kappa_fd_limit(input_dist: InputDistribution) -> float:
    """The Richardson-extrapolated finite-difference limit alone (test oracle)."""
    n_x = entropy_power(input_dist.entropy().value)
    s1, s2 = 1e-3, 1e-4
    d1 = (entropy_power(output_entropy(ScalarChannel(input_dist, s1)).value) - n_x) / s1
    d2 = (entropy_power(output_entropy(ScalarChannel(input_dist, s2)).value) - n_x) / s2
    return (s1 * d2 - s2 * d1) / (s1 - s2)


@dataclass(frozen=True)
class RateCurve:
    """Per-distortion records of every remote/CEO bound, with validity gaps."""

    distortion_grid: tuple[float, ...]
    records: tuple[dict[str, float | None], ...]


def rate_curve(setting: CEOSetting, distortion_grid: Sequence[float]) -> RateCurve:
    grid = [float(d) for d in distortion_grid]
    if any(d <= 0 for d in grid) or any(a >= b for a, b in zip(grid, grid[1:])):
        raise ParameterError("distortion grid must be positive and strictly increasing")
    records = []
    ch = setting.avg_channel
    for d in grid:
        rec: dict[str, float | None] = dict.fromkeys(RATE_CURVE_COLUMNS)
        rec["D"] = d
        try:
            rec["remote_lb1"], rec["remote_lb2"] = remote_lower_bounds(ch, d)
        except DistortionDomainError:
            pass
        try:
            rec["coop_tight"], rec["coop_weak"] = coop_bounds(setting, d)
        except DistortionDomainError:
            # the weak bound's window extends below the tight bound's
            try:
                rec["coop_weak"] = _coop_weak(setting, d)
            except DistortionDomainError:
                pass
        try:
            rec["ceo_ub"] = ceo_sum_rate_ub(setting, d)
        except DistortionDomainError:
            pass
        try:
            loss = rate_loss_bounds(setting, d)
            rec["loss_lb"] = loss.lb
            rec["loss_ub_thm9"] = loss.ub_thm9
            rec["loss_ub_thm10"] = loss.ub_thm10
            rec["loss_ub_prev"] = loss.ub_prev
            rec["loss_gauss_exact"] = loss.gauss_exact
        except DistortionDomainError:
            pass
        records.append(rec)
    return RateCurve(distortion_grid=tuple(grid), records=tuple(records))


def rate_curve_csv(curve: RateCurve, unit_scale: float = 1.0) -> str:
    """Serialize a curve; absent values become empty fields.

    ``unit_scale`` divides every rate (1.0 for nats, log(2) for bits); the
    distortion column is never scaled.
    """
    buf = io.StringIO()
    buf.write(",".join(RATE_CURVE_COLUMNS) + "\n")
    for rec in curve.records:
        cells = []
        for col in RATE_CURVE_COLUMNS:
            val = rec[col]
            if val is None:
                cells.append("")
            elif col == "D":
                cells.append(repr(float(val)))
            else:
                cells.append(repr(float(val) / unit_scale))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def loss_window(setting: CEOSetting) -> tuple[float, float]:
    """The widest D window on which the Gaussian-exact loss is defined."""
    sx2, sw2 = setting.input.variance, setting.noise_var
    m = setting.agents
    if m == math.inf:
        return 0.0, sx2
    return sx2 * sw2 / (m * sx2 + sw2), sx2


def log_spaced_window(lo: float, hi: float, n: int, inset: float = 1e-6) -> list[float]:
    """Log-spaced D grid inside (lo, hi) with endpoint insets."""
    if not 0 <= lo < hi:
        raise ParameterError(f"bad window ({lo}, {hi})")
    pad = inset * (hi - lo)
    a, b = lo + pad, hi - pad
    if lo == 0.0:
        a = hi * 1e-3
    return [float(x) for x in _geomspace(a, b, n)]


def _geomspace(a: float, b: float, n: int) -> list[float]:
    la, lb = math.log(a), math.log(b)
    return [math.exp(la + (lb - la) * i / (n - 1)) for i in range(n)]
