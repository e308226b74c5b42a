import math

import numpy as np
import pytest
from scipy import special

from dipolefocus.errors import AccuracyError, ConfigurationError, DomainError
from dipolefocus.numerics import (QuadratureRule, bessel_j, gauss_legendre, integrate_1d,
                                  integrate_cap)


class TestBessel:
    @pytest.mark.parametrize("n, expected", [(0, 1.0), (1, 0.0), (2, 0.0)])
    def test_origin(self, n, expected):
        assert bessel_j(n, 0.0) == expected

    def test_first_root_of_j0(self):
        assert abs(bessel_j(0, 2.404825557695773)) < 1e-10

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_matches_scipy_up_to_200(self, n):
        x = np.concatenate([np.linspace(0, 40, 4001), np.linspace(40, 200, 3001)])
        np.testing.assert_allclose(bessel_j(n, x), special.jv(n, x), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("x", [7.999, 8.0, 8.001, 29.999, 30.0, 30.001])
    def test_regime_boundaries_are_continuous(self, x):
        for n in (0, 1, 2):
            assert abs(bessel_j(n, x) - special.jv(n, x)) < 1e-13

    def test_large_argument(self):
        x = np.linspace(200, 1500, 1000)
        np.testing.assert_allclose(bessel_j(1, x), special.jv(1, x), atol=1e-13)

    def test_recurrence(self):
        x = np.logspace(-1, 2, 300)
        resid = bessel_j(0, x) + bessel_j(2, x) - 2.0 / x * bessel_j(1, x)
        assert np.max(np.abs(resid)) < 1e-10

    def test_negative_argument_parity(self):
        x = np.array([0.5, 9.0, 45.0])
        np.testing.assert_array_equal(bessel_j(0, -x), bessel_j(0, x))
        np.testing.assert_array_equal(bessel_j(1, -x), -bessel_j(1, x))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            bessel_j(0, bad)

    def test_order_out_of_range(self):
        with pytest.raises(DomainError):
            bessel_j(3, 1.0)


class TestGaussLegendre:
    @pytest.mark.parametrize("order", [2, 3, 7, 16, 64, 257, 1024])
    def test_matches_numpy(self, order):
        # numpy's eigenvalue-based weights lose digits at high order
        x, w = np.polynomial.legendre.leggauss(order)
        rule = gauss_legendre(order)
        np.testing.assert_allclose(rule.nodes, x, atol=1e-14)
        np.testing.assert_allclose(rule.weights, w, rtol=1e-9)

    @pytest.mark.parametrize("order, index", [(64, 0), (64, 20), (257, 0), (257, 7), (1024, 3)])
    def test_matches_high_precision(self, order, index):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 40
        rule = gauss_legendre(order)
        x = mpmath.findroot(lambda t: mpmath.legendre(order, t), mpmath.mpf(rule.nodes[index]))
        dp = mpmath.diff(lambda t: mpmath.legendre(order, t), x)
        w = 2 / ((1 - x**2) * dp**2)
        assert abs(rule.nodes[index] - float(x)) < 1e-15
        assert abs(rule.weights[index] / float(w) - 1.0) < 5e-12

    @pytest.mark.parametrize("order", [2, 5, 20, 100, 4096])
    def test_rule_invariants(self, order):
        rule = gauss_legendre(order)
        assert isinstance(rule, QuadratureRule)
        assert abs(rule.weights.sum() - 2.0) < 1e-14
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.max(np.abs(rule.nodes + rule.nodes[::-1])) < 1e-14
        assert np.all(rule.weights > 0)

    @pytest.mark.parametrize("order", [2, 4, 9, 32])
    def test_polynomial_exactness(self, order):
        rule = gauss_legendre(order)
        for d in range(2 * order):
            exact = 0.0 if d % 2 else 2.0 / (d + 1)
            got = np.dot(rule.weights, rule.nodes**d)
            assert abs(got - exact) <= 1e-13 * 2.0 / (d + 1)

    def test_x_squared_order_2(self):
        rule = gauss_legendre(2)
        assert abs(np.dot(rule.weights, rule.nodes**2) - 2.0 / 3.0) < 1e-15

    def test_cosine_order_16(self):
        rule = gauss_legendre(16)
        assert abs(np.dot(rule.weights, np.cos(rule.nodes)) - 2.0 * math.sin(1.0)) < 1e-14

    def test_sine_over_zero_pi_order_64(self):
        nodes, weights = gauss_legendre(64).scaled(0.0, math.pi)
        assert abs(np.dot(weights, np.sin(nodes)) - 2.0) < 1e-13

    @pytest.mark.parametrize("order", [0, 1, 4097, -3])
    def test_order_out_of_range(self, order):
        with pytest.raises(ConfigurationError):
            gauss_legendre(order)


class TestIntegrate1d:
    def test_aplanatic_integral(self):
        f = lambda t: np.sqrt(np.cos(t)) * np.sin(t) * (1 + np.cos(t))
        assert abs(integrate_1d(f, 0.0, 0.5 * math.pi, rtol=1e-13) - 16.0 / 15.0) < 1e-12

    def test_dipole_pattern_normalised(self):
        # angular power density 3 sin^2(t) / (8 pi) of a z dipole, integrated over phi
        f = lambda t: 3.0 / (8.0 * math.pi) * np.sin(t) ** 2 * 2.0 * math.pi * np.sin(t)
        assert abs(integrate_1d(f, 0.0, math.pi) - 1.0) < 1e-12

    def test_zero_integrand(self):
        assert integrate_1d(lambda x: np.zeros_like(x), 0.0, 1.0) == 0.0

    def test_endpoint_singularity_is_graded(self):
        f = lambda t: np.sqrt(np.abs(np.cos(t)))
        exact = math.sqrt(math.pi) * math.gamma(0.75) / (2.0 * math.gamma(1.25))
        assert abs(integrate_1d(f, 0.0, 0.5 * math.pi, rtol=1e-13) - exact) < 1e-12

    def test_doubling_order_is_stable(self):
        f = lambda t: np.sqrt(np.cos(t)) * np.sin(t) * (1 + np.cos(t))
        a = integrate_1d(f, 0.0, 1.2, rule=gauss_legendre(40), rtol=1e-13)
        b = integrate_1d(f, 0.0, 1.2, rule=gauss_legendre(80), rtol=1e-13)
        assert abs(a - b) < 1e-12

    def test_complex_and_vector_valued(self):
        f = lambda x: np.stack([np.exp(1j * x), x**2 + 0j], axis=-1)
        got = integrate_1d(f, 0.0, math.pi)
        np.testing.assert_allclose(got, [2j, math.pi**3 / 3], rtol=1e-12)

    def test_non_convergence_carries_estimate(self):
        f = lambda x: np.sign(np.sin(1e3 * x)) * np.sqrt(np.abs(x - 0.3))
        with pytest.raises(AccuracyError) as info:
            integrate_1d(f, 0.0, 1.0, rtol=1e-15, atol=0.0, max_refinements=3)
        assert info.value.estimate is not None
        assert info.value.gap > 0

    def test_rejects_reversed_interval(self):
        with pytest.raises(DomainError):
            integrate_1d(np.sin, 1.0, 0.0)


class TestIntegrateCap:
    def test_sphere_area(self):
        got = integrate_cap(lambda t, p: np.ones(np.broadcast(t, p).shape), math.pi)
        assert abs(got - 4 * math.pi) < 1e-12

    def test_cap_area(self):
        a = 0.7
        got = integrate_cap(lambda t, p: np.ones(np.broadcast(t, p).shape), a)
        assert abs(got - 2 * math.pi * (1 - math.cos(a))) < 1e-12

    def test_zone_between_angles(self):
        f = lambda t, p: np.cos(t) ** 2 * np.cos(p) ** 2
        got = integrate_cap(f, 2.0, 0.4)
        exact = math.pi * (math.cos(0.4) ** 3 - math.cos(2.0) ** 3) / 3.0
        assert abs(got - exact) < 1e-12

    def test_dipole_pattern_full_sphere(self):
        f = lambda t, p: 1.0 - (np.sin(t) * np.cos(p)) ** 2
        assert abs(integrate_cap(f, math.pi) - 8 * math.pi / 3) < 1e-12
