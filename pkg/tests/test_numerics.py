import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmentropy import (
    ConvergenceError,
    DegenerateSampleError,
    EstimateWithError,
    InputError,
    ParameterError,
    central_diff,
    digamma,
    entropy_from_pdf,
    gauss_hermite,
    integrate,
    knn_entropy,
    log_gamma,
)

SQRT_PI = math.sqrt(math.pi)
GAUSS_H = 0.5 * math.log(2 * math.pi * math.e)


def std_normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


class TestGaussHermite:
    def test_two_point_rule(self):
        rule = gauss_hermite(2)
        assert np.allclose(np.sort(rule.nodes), [-1 / math.sqrt(2), 1 / math.sqrt(2)])
        assert np.allclose(rule.weights, [SQRT_PI / 2, SQRT_PI / 2])

    def test_one_point_rule(self):
        rule = gauss_hermite(1)
        assert rule.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert rule.weights[0] == pytest.approx(SQRT_PI, abs=1e-14)

    def test_weight_sum(self):
        for order in (2, 16, 96, 512):
            rule = gauss_hermite(order)
            assert rule.weights.sum() == pytest.approx(SQRT_PI, abs=1e-12)
            assert np.all(rule.weights > 0)

    def test_x2_moment_order_64(self):
        rule = gauss_hermite(64)
        assert rule.integrate(lambda x: x * x) == pytest.approx(SQRT_PI / 2, abs=1e-12)

    @pytest.mark.parametrize("j", range(0, 16))
    def test_monomial_moments(self, j):
        # against e^{-x^2}: odd moments 0, even moments Gamma((j+1)/2)
        rule = gauss_hermite(16)
        got = rule.integrate(lambda x: x ** j)
        want = 0.0 if j % 2 else math.gamma((j + 1) / 2)
        assert got == pytest.approx(want, abs=1e-10)

    def test_standard_normal_reweighting(self):
        rule = gauss_hermite(32)
        assert rule.expect_gaussian(lambda z: np.ones_like(z)) == pytest.approx(1.0, abs=1e-10)
        assert rule.expect_gaussian(lambda z: z * z, mu=0.0, var=3.0) == pytest.approx(3.0, abs=1e-9)

    @pytest.mark.parametrize("order", [0, -3, 513, 2.5])
    def test_order_out_of_range(self, order):
        with pytest.raises(ParameterError):
            gauss_hermite(order)


class TestIntegrate:
    def test_normal_mass(self):
        est = integrate(std_normal_pdf, -math.inf, math.inf, tol=1e-10)
        assert est.value == pytest.approx(1.0, abs=1e-10)
        assert est.method == "quadrature"

    def test_gamma_two_mean_numerator(self):
        est = integrate(lambda x: x * math.exp(-x), 0.0, math.inf, tol=1e-10)
        assert est.value == pytest.approx(1.0, abs=1e-10)

    def test_uniform_plogp(self):
        est = integrate(lambda x: 0.5 * math.log(0.5), 0.0, 2.0, tol=1e-12)
        assert est.value == pytest.approx(-math.log(2), abs=1e-12)

    def test_error_bound_holds_on_analytic_set(self):
        cases = [
            (std_normal_pdf, -math.inf, math.inf, 1.0),
            (lambda x: x * math.exp(-x), 0.0, math.inf, 1.0),
            (lambda x: math.exp(-abs(x)) / 2, -math.inf, math.inf, 1.0),
            (math.cos, 0.0, math.pi / 2, 1.0),
        ]
        for f, a, b, truth in cases:
            est = integrate(f, a, b, tol=1e-9)
            assert abs(est.value - truth) <= max(est.abs_error, 1e-13)

    def test_breakpoints_on_kinked_integrand(self):
        est = integrate(lambda x: math.exp(-abs(x)) / 2, -math.inf, math.inf,
                        tol=1e-11, breakpoints=[0.0])
        assert est.value == pytest.approx(1.0, abs=1e-11)

    def test_empty_interval_rejected(self):
        with pytest.raises(ParameterError):
            integrate(math.sin, 1.0, 1.0)

    def test_nonconvergence_carries_estimate(self):
        # highly oscillatory integrand at an unreachable tolerance
        with pytest.raises(ConvergenceError) as err:
            integrate(lambda x: math.cos(2000.0 * x * x), 0.0, 40.0, tol=1e-14)
        assert err.value.estimate is not None


class TestEntropyFromPdf:
    def test_standard_normal(self):
        est = entropy_from_pdf(std_normal_pdf, (-math.inf, math.inf))
        assert est.value == pytest.approx(GAUSS_H, abs=1e-6)

    def test_uniform(self):
        s = math.sqrt(3)
        est = entropy_from_pdf(lambda x: 1 / (2 * s), (-s, s))
        assert est.value == pytest.approx(math.log(2 * s), abs=1e-6)

    def test_exponential(self):
        est = entropy_from_pdf(lambda x: math.exp(-x), (0.0, math.inf))
        assert est.value == pytest.approx(1.0, abs=1e-6)

    def test_laplace(self):
        b = 1 / math.sqrt(2)
        est = entropy_from_pdf(
            lambda x: math.exp(-abs(x) / b) / (2 * b),
            (-math.inf, math.inf),
            breakpoints=[0.0],
        )
        assert est.value == pytest.approx(1 + math.log(2 * b), abs=1e-6)

    def test_rejects_unnormalized_pdf(self):
        with pytest.raises(InputError):
            entropy_from_pdf(lambda x: 2 * std_normal_pdf(x), (-math.inf, math.inf))


class TestKnnEntropy:
    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_gaussian_closed_form(self, dim):
        rng = np.random.default_rng(2024)
        x = rng.standard_normal((1_000_000, dim))
        est = knn_entropy(x, k=4, seed=11)
        assert abs(est.value - dim * GAUSS_H) < 0.02

    def test_unit_uniform(self):
        rng = np.random.default_rng(5)
        est = knn_entropy(rng.random(1_000_000), k=4, seed=11)
        assert abs(est.value) < 0.01

    def test_scaling_shift(self):
        rng = np.random.default_rng(6)
        est = knn_entropy(0.5 * rng.standard_normal(1_000_000), k=4, seed=11)
        assert abs(est.value - (GAUSS_H - math.log(2))) < 0.01

    def test_seed_determinism(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(2000)
        a = knn_entropy(x, k=4, seed=3)
        b = knn_entropy(x, k=4, seed=3)
        assert a == b

    def test_tie_heavy_rejected(self):
        x = np.concatenate([np.zeros(200), np.random.default_rng(0).standard_normal(1800)])
        with pytest.raises(DegenerateSampleError):
            knn_entropy(x, k=4)

    def test_too_few_samples(self):
        with pytest.raises(ParameterError):
            knn_entropy(np.arange(100, dtype=float), k=4)


class TestCentralDiff:
    def test_quadratic_exact(self):
        assert central_diff(lambda x: x * x, 3.0, 1e-4) == pytest.approx(6.0, abs=1e-7)

    def test_constant(self):
        assert central_diff(lambda x: 5.0, 1.0, 1e-3) == 0.0

    def test_exp_at_zero(self):
        assert central_diff(math.exp, 0.0, 1e-5) == pytest.approx(1.0, abs=1e-9)

    @given(st.floats(-3, 3), st.floats(-5, 5), st.floats(-2, 2))
    @settings(max_examples=50, deadline=None)
    def test_exact_for_quadratics(self, a, b, y):
        got = central_diff(lambda x: a * x * x + b * x + 1.0, y, 1e-4)
        assert got == pytest.approx(2 * a * y + b, abs=1e-6 * (1 + abs(a) + abs(b)))

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError):
            central_diff(lambda x: math.inf, 0.0, 1e-3)


class TestSpecialFunctions:
    def test_log_gamma_values(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-12)

    def test_digamma_values(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649, abs=1e-9)
        assert digamma(2.0) == pytest.approx(1 - 0.5772156649, abs=1e-9)

    @given(st.floats(0.1, 30.0))
    @settings(max_examples=50, deadline=None)
    def test_digamma_recurrence(self, x):
        assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-10)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain_errors(self, x):
        with pytest.raises(ParameterError):
            log_gamma(x)
        with pytest.raises(ParameterError):
            digamma(x)


class TestEstimateWithError:
    def test_analytic_zero_error(self):
        with pytest.raises(InputError):
            EstimateWithError(1.0, 0.5, "analytic")

    def test_negative_error_rejected(self):
        with pytest.raises(InputError):
            EstimateWithError(1.0, -1e-3, "quadrature")
