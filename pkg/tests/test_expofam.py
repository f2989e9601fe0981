import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import stats

from cmentropy import ParameterError
from cmentropy import awgn
from cmentropy import distributions as dist
from cmentropy import expofam


BP63 = dist.make_beta_prime(6.0, 3.0)
CH63 = expofam.make_gamma_channel(BP63, 6.0)


class TestChannelConstruction:
    def test_conditional_density_normalizes(self):
        # spot-check on 5 quantiles of the input law
        xs = np.quantile(BP63.sample(200_000, 3), [0.1, 0.3, 0.5, 0.7, 0.9])
        for x in xs:
            mass, _ = sci_integrate.quad(
                lambda y: math.exp(CH63.conditional_log_pdf(float(x), y)),
                0, math.inf)
            assert mass == pytest.approx(1.0, abs=1e-7)

    def test_parameter_checks(self):
        with pytest.raises(ParameterError):
            expofam.make_gamma_channel(BP63, -1.0)
        with pytest.raises(ParameterError):
            expofam.make_gamma_channel(dist.make_gaussian(0, 1), 2.0)
        with pytest.raises(ParameterError):
            expofam.make_gamma_channel(None, 2.0)


class TestNuRatio:
    def test_marginal_is_gamma(self):
        # Beta-prime(alpha, gamma) input makes Y exactly Gamma(gamma, 1)
        for y in (0.3, 1.0, 2.5, 7.0):
            assert expofam.marginal_pdf_y(CH63, y) == pytest.approx(
                stats.gamma.pdf(y, 3.0), rel=1e-8)

    def test_point_mass_closed_form(self):
        ch = expofam.make_gamma_channel(None, 2.0, point_mass=1.5)
        y = 1.2
        want = math.exp(-1.5 * y + 2.0 * math.log(1.5))
        assert expofam.nu_ratio(ch, y) == pytest.approx(want, rel=1e-12)

    def test_marginal_normalizes(self):
        mass, _ = sci_integrate.quad(lambda y: expofam.marginal_pdf_y(CH63, y),
                                     0, math.inf)
        assert mass == pytest.approx(1.0, abs=1e-7)


class TestPosteriorMoments:
    def test_closed_forms_by_quadrature(self):
        d = 3.0
        for y in (0.5, 2.0, 4.0, 9.0):
            mean, var = expofam.posterior_moments_quad(CH63, y)
            assert mean == pytest.approx(1 + d / y, rel=1e-6)
            assert var == pytest.approx(d / y ** 2, rel=1e-6)

    def test_derivative_route_on_grid(self):
        d = 3.0
        for y in np.linspace(0.4, 10.0, 21):
            mean, var = expofam.posterior_moments_tweedie(CH63, float(y))
            assert abs(mean - (1 + d / y)) <= 1e-4 * (1 + abs(mean))
            assert abs(var - d / y ** 2) <= 1e-4 * (1 + var)

    def test_point_mass(self):
        ch = expofam.make_gamma_channel(None, 2.0, point_mass=2.5)
        mean, var = expofam.posterior_moments_tweedie(ch, 1.0)
        assert mean == 2.5 and var == 0.0

    def test_awgn_specialization_matches_scalar_channel(self):
        noise_var = 0.5
        g = dist.make_gaussian(0.3, 1.5)
        ch = expofam.make_gaussian_base_channel(g, noise_var)
        scaled = dist.make_gaussian(noise_var * 0.3, noise_var ** 2 * 1.5)
        sch = awgn.ScalarChannel(scaled, noise_var)
        for y in (-1.0, 0.4, 1.3):
            mean, var = expofam.posterior_moments_tweedie(ch, y)
            pp = awgn.posterior_point(sch, y)
            assert noise_var * mean == pytest.approx(pp.cond_mean, abs=1e-7)
            assert noise_var ** 2 * var == pytest.approx(pp.cond_var, abs=1e-6)


class TestLowerBound:
    @pytest.mark.parametrize("alpha,gamma", [(4.0, 2.5), (6.0, 3.0), (10.0, 4.0)])
    def test_bound_holds(self, alpha, gamma):
        ch = expofam.make_gamma_channel(dist.make_beta_prime(alpha, gamma), alpha)
        r = expofam.thm7_lower_bound(ch)
        assert r.truth >= r.bound - 1e-6

    @pytest.mark.parametrize("d", [0.5, 1.0, 3.0, 7.0])
    def test_numeric_gap_matches_analytic_formula(self, d):
        alpha, gamma = 3.0 + d, 3.0
        ch = expofam.make_gamma_channel(dist.make_beta_prime(alpha, gamma), alpha)
        r = expofam.thm7_lower_bound(ch)
        assert r.gap == pytest.approx(expofam.betaprime_gap_analytic(d), abs=1e-3)

    def test_gap_at_d_one(self):
        assert expofam.betaprime_gap_analytic(1.0) == pytest.approx(
            math.log(2 * math.pi * math.e) - 2, abs=1e-12)
        assert expofam.betaprime_gap_analytic(1.0) == pytest.approx(0.83788, abs=1e-5)

    def test_gap_asymptotics(self):
        small = expofam.betaprime_gap_analytic(0.01) * 0.01 / 2
        large = expofam.betaprime_gap_analytic(50.0) * 3 * 50.0 / 2
        assert abs(small - 1.0) < 0.1
        assert abs(large - 1.0) < 0.1

    @pytest.mark.parametrize("alpha,gamma", [(3.5, 3.0), (4.0, 3.0), (6.0, 3.0),
                                             (10.0, 3.0), (4.0, 2.5), (10.0, 4.0)])
    def test_analytic_decomposition_consistency(self, alpha, gamma):
        ex = expofam.betaprime_example_analytic(alpha, gamma)
        assert ex["gap"] == pytest.approx(
            expofam.betaprime_gap_analytic(alpha - gamma), abs=1e-12)

    def test_awgn_reduction_recovers_gaussian_noise_bound(self):
        noise_var = 0.5
        g = dist.make_gaussian(0.0, 1.5)
        ch = expofam.make_gaussian_base_channel(g, noise_var)
        r = expofam.thm7_lower_bound(ch)
        scaled = dist.make_gaussian(0.0, noise_var ** 2 * 1.5)
        sch = awgn.ScalarChannel(scaled, noise_var)
        lower_main = 2 * scaled.entropy_analytic - awgn.output_entropy(sch).value
        # entropy of the scaled estimate differs by log(noise_var)
        assert r.bound + math.log(noise_var) == pytest.approx(lower_main, abs=1e-6)
        assert r.truth + math.log(noise_var) == pytest.approx(
            awgn.entropy_cond_mean(sch).value, abs=1e-6)


class TestGammaCorrective:
    def test_finite_and_bound_holds_for_beta_prime(self):
        delta = expofam.gamma_corrective(BP63, 6.0)
        assert math.isfinite(delta)
        r = expofam.thm7_lower_bound(CH63)
        h_x = BP63.entropy().value
        h_y = expofam.output_entropy_y(CH63).value
        assert 2 * h_x - h_y + 2 * delta <= r.truth + 1e-6
        # corrective and bound agree with the channel-level evaluation
        assert 2 * delta == pytest.approx(r.corrective, abs=1e-8)

    def test_point_mass_log_x(self):
        ch = expofam.make_gamma_channel(None, 3.0, point_mass=1.0)
        assert expofam.expected_log_x(ch).value == 0.0

    def test_sign_change_in_alpha(self):
        # corrective term is positive at alpha = 6 and negative for small alpha
        assert expofam.gamma_corrective(BP63, 6.0) > 0
        assert expofam.gamma_corrective(BP63, 0.05) < 0
