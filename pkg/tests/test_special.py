import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from hailchi.special import (chi_cdf, chi_family_cdf, chi_family_quantile, chi_pdf,
                             disc_average_density, lognormal_cdf, lognormal_pdf,
                             normal_cdf, normal_quantile, reg_beta_I, reg_gamma_P)

from oracles import bisect_inverse, normal_density


class TestNormalCdf:
    def test_median(self):
        assert normal_cdf(0.0) == 0.5

    def test_tail_saturation(self):
        assert abs(normal_cdf(38.0) - 1.0) < 1e-15

    def test_against_quadrature(self):
        # oracle: adaptive quadrature of the density over (-inf, 1]
        expected, _ = integrate.quad(normal_density, -np.inf, 1.0)
        assert abs(normal_cdf(1.0) - expected) < 1e-12

    @given(st.floats(-8, 8))
    def test_symmetry(self, x):
        assert abs(normal_cdf(x) + normal_cdf(-x) - 1.0) < 1e-14

    def test_strictly_increasing(self):
        xs = np.sort(np.random.default_rng(7).uniform(-6, 6, size=200))
        values = [normal_cdf(x) for x in xs]
        assert all(a < b for a, b in zip(values, values[1:]))


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-14)

    def test_round_trip(self):
        assert normal_quantile(normal_cdf(1.3)) == pytest.approx(1.3, abs=1e-10)

    def test_against_bisection(self):
        expected = bisect_inverse(normal_cdf, 0.975, -10.0, 10.0, tol=1e-13)
        assert normal_quantile(0.975) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)

    @given(st.floats(1e-6, 1 - 1e-6))
    def test_round_trip_property(self, p):
        assert abs(normal_cdf(normal_quantile(p)) - p) < 1e-10


class TestLogNormal:
    def test_mode_by_grid_search(self):
        mu, sigma = 0.3, 0.8
        mode = math.exp(mu - sigma * sigma)
        grid = np.linspace(0.01, 5.0, 20000)
        values = [lognormal_pdf(r, mu, sigma) for r in grid]
        assert lognormal_pdf(mode, mu, sigma) >= max(values)

    def test_unit_point(self):
        assert lognormal_pdf(1.0, 0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-14)

    def test_vanishes_at_center(self):
        values = [lognormal_pdf(r, 0.0, 1.0) for r in (1e-3, 1e-6, 1e-9)]
        assert values[0] > values[1] > values[2]
        assert values[2] < 1e-30

    def test_integrates_to_one(self):
        total, _ = integrate.quad(lambda r: lognormal_pdf(r, 0.2, 0.5), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_cdf_median(self):
        assert lognormal_cdf(math.exp(-1.2), -1.2, 0.7) == pytest.approx(0.5, abs=1e-14)

    def test_cdf_matches_normal(self):
        assert lognormal_cdf(2.0, 0.0, 1.0) == pytest.approx(normal_cdf(math.log(2.0)), abs=1e-15)

    def test_cdf_small_r_limit(self):
        assert lognormal_cdf(1e-12, 0.0, 1.0) < 1e-100

    @pytest.mark.parametrize("fn", [lognormal_pdf, lognormal_cdf])
    def test_domain(self, fn):
        with pytest.raises(ValueError):
            fn(0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            fn(1.0, 0.0, 0.0)


class TestRegGamma:
    @pytest.mark.parametrize("a", [0.3, 1.0, 2.5, 7.0])
    def test_at_zero(self, a):
        assert reg_gamma_P(a, 0.0) == 0.0

    def test_exponential_special_case(self):
        for x in np.linspace(0.0, 50.0, 101):
            assert abs(reg_gamma_P(1.0, x) - (-math.expm1(-x))) < 1e-13

    def test_against_quadrature(self):
        a = 0.5
        expected, _ = integrate.quad(
            lambda t: t ** (a - 1) * math.exp(-t) / math.gamma(a), 0, 2.0, points=[0])
        assert reg_gamma_P(a, 2.0) == pytest.approx(expected, abs=1e-10)

    def test_monotone_and_limit(self):
        values = [reg_gamma_P(2.5, x) for x in np.linspace(0, 60, 200)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            reg_gamma_P(0.0, 1.0)
        with pytest.raises(ValueError):
            reg_gamma_P(1.0, -0.1)


class TestRegBeta:
    def test_endpoints(self):
        assert reg_beta_I(2.0, 3.0, 0.0) == 0.0
        assert reg_beta_I(2.0, 3.0, 1.0) == 1.0

    @given(st.floats(0, 1))
    def test_uniform_case(self, x):
        assert abs(reg_beta_I(1.0, 1.0, x) - x) < 1e-14

    def test_against_quadrature(self):
        norm = math.exp(math.lgamma(2) + math.lgamma(3) - math.lgamma(5))
        expected, _ = integrate.quad(lambda t: t * (1 - t) ** 2 / norm, 0, 0.4)
        assert reg_beta_I(2.0, 3.0, 0.4) == pytest.approx(expected, abs=1e-10)

    @given(st.floats(0.1, 20), st.floats(0.1, 20), st.floats(0.001, 0.999))
    def test_complement_identity(self, a, b, x):
        # x bounded away from the endpoints: for a or b < 1 the density blows
        # up there and the rounding of the test's own 1-x dominates
        assert abs(reg_beta_I(a, b, x) + reg_beta_I(b, a, 1.0 - x) - 1.0) < 1e-12

    def test_complement_identity_at_exact_endpoints(self):
        assert reg_beta_I(2.0, 3.0, 0.0) + reg_beta_I(3.0, 2.0, 1.0) == 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            reg_beta_I(-1.0, 2.0, 0.5)
        with pytest.raises(ValueError):
            reg_beta_I(1.0, 2.0, 1.5)


class TestChi:
    def test_rayleigh_density(self):
        for r in (0.3, 1.0, 2.2):
            assert chi_pdf(r, 2) == pytest.approx(r * math.exp(-r * r / 2), rel=1e-14)

    def test_zero_at_origin(self):
        for n in (2, 3, 5):
            assert chi_pdf(0.0, n) == 0.0

    def test_density_against_quadrature_normalization(self):
        # oracle: the n=3 formula integrates to 1; its value at r=1 matches
        value = chi_pdf(1.0, 3)
        total, _ = integrate.quad(lambda r: chi_pdf(r, 3), 0, 40)
        assert total == pytest.approx(1.0, abs=1e-8)
        assert value == pytest.approx(math.sqrt(2 / math.pi) * math.exp(-0.5), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_normalization(self, n):
        total, _ = integrate.quad(lambda r: chi_pdf(r, n), 0, 40, points=[0, 1])
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_cdf_rayleigh(self):
        for r in (0.5, 1.0, 3.0):
            assert chi_cdf(r, 2) == pytest.approx(1.0 - math.exp(-r * r / 2), abs=1e-14)

    def test_cdf_at_zero(self):
        for n in (1, 2, 6):
            assert chi_cdf(0.0, n) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    @pytest.mark.parametrize("r", [0.5, 1.0, 1.5, 2.0, 4.0])
    def test_cdf_against_quadrature(self, n, r):
        expected, _ = integrate.quad(lambda s: chi_pdf(s, n), 0, r)
        assert chi_cdf(r, n) == pytest.approx(expected, abs=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            chi_pdf(1.0, 0)
        with pytest.raises(ValueError):
            chi_cdf(-1.0, 2)


class TestChiFamily:
    def test_reduces_to_rayleigh(self):
        rng = np.random.default_rng(3)
        for r in rng.uniform(0, 5, size=50):
            assert abs(chi_family_cdf(r, 1.0) - chi_cdf(r, 2)) < 1e-14

    @given(st.floats(0, 10), st.floats(0.01, 50))
    def test_scaling_identity(self, r, lam):
        assert abs(chi_family_cdf(r, lam) - chi_family_cdf(lam * r, 1.0)) < 1e-14

    def test_reference_lambda_value(self):
        expected = 1.0 - math.exp(-0.5 * (7.308 * 0.2) ** 2)
        assert chi_family_cdf(0.2, 7.308) == pytest.approx(expected, rel=1e-14)

    def test_matches_scaled_chi2(self):
        rng = np.random.default_rng(11)
        for r, lam in zip(rng.uniform(0, 4, 50), rng.uniform(0.1, 10, 50)):
            assert abs(chi_family_cdf(r, lam) - chi_cdf(lam * r, 2)) < 1e-14

    def test_quantile_zero(self):
        assert chi_family_quantile(0.0, 2.0) == 0.0

    def test_quantile_round_trip(self):
        r = chi_family_quantile(0.7, 2.0)
        assert chi_family_cdf(r, 2.0) == pytest.approx(0.7, abs=1e-12)

    def test_quantile_median(self):
        # oracle: analytic inversion cross-checked by bisection
        expected = bisect_inverse(lambda r: chi_family_cdf(r, 1.0), 0.5, 0.0, 10.0)
        assert chi_family_quantile(0.5, 1.0) == pytest.approx(math.sqrt(2 * math.log(2)), rel=1e-12)
        assert chi_family_quantile(0.5, 1.0) == pytest.approx(expected, abs=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            chi_family_cdf(1.0, 0.0)
        with pytest.raises(ValueError):
            chi_family_quantile(1.0, 2.0)


class TestDiscAverageDensity:
    def test_decreasing_to_zero_for_reference_params(self):
        values = [disc_average_density(10.0 ** -k, -1.862, 0.6227) for k in range(1, 7)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-12

    def test_at_median_radius(self):
        mu = 0.4
        expected = 1.0 / (2 * math.pi * math.exp(2 * mu))
        assert disc_average_density(math.exp(mu), mu, 1.3) == pytest.approx(expected, rel=1e-14)

    def test_against_disc_quadrature(self):
        # oracle: the raw double integral of the radial density over the disc,
        # divided by the disc area
        eps = 0.5
        integral, _ = integrate.dblquad(
            lambda phi, r: lognormal_pdf(r, 0.0, 1.0) / (2 * math.pi),
            1e-300, eps, 0.0, 2 * math.pi)
        expected = integral / (math.pi * eps * eps)
        assert disc_average_density(eps, 0.0, 1.0) == pytest.approx(expected, abs=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            disc_average_density(0.0, 0.0, 1.0)
