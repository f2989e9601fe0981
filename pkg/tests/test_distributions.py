import math

import numpy as np
import pytest

from cmentropy import ConvergenceError, ParameterError, SpecStringError
from cmentropy import distributions as dist
from cmentropy.numerics import entropy_from_pdf, integrate

GAUSS_H = 0.5 * math.log(2 * math.pi * math.e)


def catalog(var=1.0, gm2_var=2.0):
    return [
        dist.make_gaussian(0.0, var),
        dist.make_uniform_zero_mean(var),
        dist.make_exponential_shifted(var),
        dist.make_laplace(var),
        dist.make_triangular(var),
        dist.make_gaussian_mixture_pm1(gm2_var),
    ]


class TestCatalogInvariants:
    @pytest.mark.parametrize("d", catalog() + [dist.make_beta_prime(6.0, 3.0)],
                             ids=lambda d: d.name)
    def test_normalization(self, d):
        lo, hi = d.support
        mass = integrate(lambda x: float(d.pdf(x)), lo, hi, tol=1e-9,
                         breakpoints=d.breakpoints)
        assert mass.value == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("d", catalog() + [dist.make_beta_prime(6.0, 3.0)],
                             ids=lambda d: d.name)
    def test_declared_moments(self, d):
        lo, hi = d.support
        m = integrate(lambda x: x * float(d.pdf(x)), lo, hi, tol=1e-9,
                      breakpoints=d.breakpoints)
        v = integrate(lambda x: (x - d.mean) ** 2 * float(d.pdf(x)), lo, hi,
                      tol=1e-8, breakpoints=d.breakpoints)
        assert abs(m.value - d.mean) <= 1e-6 * (1 + abs(d.mean))
        assert abs(v.value - d.variance) <= 1e-6 * (1 + d.variance)

    @pytest.mark.parametrize("d", catalog(), ids=lambda d: d.name)
    def test_analytic_entropy_matches_quadrature(self, d):
        if d.entropy_analytic is None:
            pytest.skip("no closed-form entropy")
        est = entropy_from_pdf(lambda x: float(d.pdf(x)), d.trunc,
                               breakpoints=d.breakpoints)
        assert est.value == pytest.approx(d.entropy_analytic, abs=1e-6)

    @pytest.mark.parametrize("d", catalog() + [dist.make_beta_prime(6.0, 3.0)],
                             ids=lambda d: d.name)
    def test_sample_moments(self, d):
        n = 1_000_000
        s = d.sample(n, seed=20260810)
        se_mean = d.sigma / math.sqrt(n)
        assert abs(s.mean() - d.mean) < 5 * se_mean
        # SE of the sample variance from the sample's own fourth moment
        centered = s - s.mean()
        se_var = math.sqrt(max(np.mean(centered ** 4) - s.var() ** 2, 0.0) / n)
        assert abs(s.var() - d.variance) < 5 * se_var

    def test_sampler_determinism(self):
        d = dist.make_laplace(1.0)
        assert np.array_equal(d.sample(1000, 7), d.sample(1000, 7))
        assert not np.array_equal(d.sample(1000, 7), d.sample(1000, 8))

    def test_gaussian_is_entropy_maximizer_at_fixed_variance(self):
        hmax = dist.make_gaussian(0.0, 1.0).entropy_analytic
        for d in catalog()[1:5]:  # uniform, exponential, laplace, triangular at var 1
            assert d.entropy_analytic < hmax - 1e-3
        gm = dist.make_gaussian_mixture_pm1(2.0)
        h_gm = entropy_from_pdf(lambda x: float(gm.pdf(x)), gm.trunc).value
        assert h_gm < dist.make_gaussian(0.0, 2.0).entropy_analytic - 1e-3


class TestGaussian:
    def test_entropy_values(self):
        assert dist.make_gaussian(0, 1).entropy_analytic == pytest.approx(1.41894, abs=1e-5)
        assert dist.make_gaussian(5, 1).entropy_analytic == pytest.approx(1.41894, abs=1e-5)
        assert dist.make_gaussian(0, 4).entropy_analytic == pytest.approx(
            1.41894 + math.log(2), abs=1e-5)

    def test_bad_variance(self):
        with pytest.raises(ParameterError):
            dist.make_gaussian(0.0, 0.0)


class TestNamedFamilies:
    def test_uniform_support_and_entropy(self):
        d = dist.make_uniform_zero_mean(1.0)
        s = math.sqrt(3)
        assert d.support == (-s, s)
        assert d.entropy_analytic == pytest.approx(math.log(2 * s), abs=1e-12)

    def test_laplace_entropy(self):
        d = dist.make_laplace(1.0)
        assert d.entropy_analytic == pytest.approx(1 + math.log(math.sqrt(2)), abs=1e-12)

    def test_exponential_entropy_shift_invariant(self):
        assert dist.make_exponential_shifted(1.0).entropy_analytic == pytest.approx(1.0)

    @pytest.mark.parametrize("ctor", [
        dist.make_uniform_zero_mean,
        dist.make_exponential_shifted,
        dist.make_laplace,
        dist.make_triangular,
    ])
    def test_nonpositive_variance(self, ctor):
        with pytest.raises(ParameterError):
            ctor(-1.0)


class TestGaussianMixture:
    def test_variance_construction(self):
        d = dist.make_gaussian_mixture_pm1(2.0)
        v = integrate(lambda x: x * x * float(d.pdf(x)), *d.trunc, tol=1e-9)
        assert v.value == pytest.approx(2.0, abs=1e-7)

    def test_pdf_at_zero(self):
        d = dist.make_gaussian_mixture_pm1(2.0)
        phi1 = math.exp(-0.5) / math.sqrt(2 * math.pi)
        assert float(d.pdf(0.0)) == pytest.approx(phi1, abs=1e-12)

    def test_entropy_decreases_toward_bernoulli_limit(self):
        # h(X) must trend down as var -> 1+ (components sharpen)
        hs = []
        for var in (2.0, 1.25, 1.05):
            d = dist.make_gaussian_mixture_pm1(var)
            hs.append(entropy_from_pdf(lambda x: float(d.pdf(x)), d.trunc).value)
        assert hs[0] > hs[1] > hs[2]

    def test_degenerate_variance_rejected(self):
        with pytest.raises(ParameterError):
            dist.make_gaussian_mixture_pm1(1.0)


class TestBetaPrime:
    def test_support_edge(self):
        d = dist.make_beta_prime(6.0, 3.0)
        assert d.support[0] == 1.0
        assert float(d.pdf(0.5)) == 0.0

    def test_moments_match_monte_carlo(self):
        d = dist.make_beta_prime(6.0, 3.0)
        n = 1_000_000
        s = d.sample(n, seed=99)
        se = s.std() / math.sqrt(n)
        assert abs(s.mean() - d.mean) < 5 * se

    def test_constraint_violations(self):
        for a, g in [(3.0, 3.0), (5.0, 2.0), (2.5, 3.0)]:
            with pytest.raises(ParameterError):
                dist.make_beta_prime(a, g)


class TestFisherInformation:
    def test_gaussian(self):
        for var in (0.5, 1.0, 4.0):
            est = dist.fisher_information(dist.make_gaussian(0.0, var))
            assert est.value == pytest.approx(1 / var, rel=1e-6)

    def test_shift_invariance(self):
        est = dist.fisher_information(dist.make_gaussian(5.0, 1.0))
        assert est.value == pytest.approx(1.0, rel=1e-6)

    def test_laplace(self):
        est = dist.fisher_information(dist.make_laplace(1.0))
        assert est.value == pytest.approx(2.0, rel=1e-4)

    @pytest.mark.parametrize("d", [
        dist.make_uniform_zero_mean(1.0),
        dist.make_exponential_shifted(1.0),
        dist.make_triangular(1.0),
    ], ids=lambda d: d.name)
    def test_divergent_laws_rejected(self, d):
        with pytest.raises(ConvergenceError):
            dist.fisher_information(d)


class TestSpecStrings:
    def test_roundtrip_examples(self):
        assert dist.parse_distribution("gaussian:mu=0,var=1").name == "gaussian"
        assert dist.parse_distribution("gm2:var=2").variance == 2.0
        d = dist.parse_distribution("betaprime:alpha=6,gamma=3")
        assert d.name == "betaprime"

    @pytest.mark.parametrize("bad", [
        "gauss:var=1",
        "gaussian:sigma=1,var=1",
        "gaussian:mu=0",
        "gaussian:mu=0,var=abc",
        "uniform:var=1,var=2",
        "gm2:var=0.5",
        "uniform",
    ])
    def test_bad_specs(self, bad):
        with pytest.raises(SpecStringError):
            dist.parse_distribution(bad)
