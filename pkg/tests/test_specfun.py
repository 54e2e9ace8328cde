import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from wignerclass import specfun
from wignerclass.errors import HypergeometricDivergence, OverflowSignal


def exact_laguerre(n, k, x):
    """Explicit sum of L_n^(k)(x) in rational arithmetic."""
    x = Fraction(x)
    total = Fraction(0)
    for i in range(n + 1):
        total += Fraction(math.comb(n + k, n - i)) * (-x) ** i / math.factorial(i)
    return float(total)


def series_j0(x, terms=120):
    """Independent power series for J0 in rational arithmetic."""
    x = Fraction(x)
    total, term = Fraction(0), Fraction(1)
    for k in range(terms):
        if k:
            term *= -(x / 2) ** 2 / (k * k)
        total += term
    return float(total)


class TestAccuracyBudget:
    def test_defaults_valid(self):
        b = specfun.AccuracyBudget()
        assert 0 < b.rel_tol <= 1e-3 and b.max_terms >= 50

    @pytest.mark.parametrize("rel_tol", [0.0, -1e-10, 2e-3])
    def test_rejects_bad_rel_tol(self, rel_tol):
        with pytest.raises(ValueError):
            specfun.AccuracyBudget(rel_tol=rel_tol)

    def test_rejects_small_term_cap(self):
        with pytest.raises(ValueError):
            specfun.AccuracyBudget(max_terms=10)


class TestBesselJ0:
    def test_at_zero(self):
        assert specfun.bessel_j0(0.0) == 1.0

    def test_first_zero(self):
        assert abs(specfun.bessel_j0(2.404825557695773)) < 1e-12

    def test_first_zero_matches_independent_series_bisection(self):
        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if series_j0(mid) > 0:
                lo = mid
            else:
                hi = mid
        assert abs(lo - 2.404825557695773) < 1e-13
        assert abs(specfun.bessel_j0_zeros(1)[0] - lo) < 1e-13

    def test_large_argument_asymptotics(self):
        x = 100.0
        leading = math.sqrt(2 / (math.pi * x)) * math.cos(x - math.pi / 4)
        assert abs(specfun.bessel_j0(x) - leading) < 2e-3

    def test_against_reference(self):
        x = np.linspace(-60, 60, 4001)
        ref = sc.j0(x)
        err = np.abs(specfun.bessel_j0(x) - ref) / np.maximum(1.0, np.abs(ref))
        assert err.max() <= 1e-12

    def test_series_asymptotic_seam(self):
        seam = 12.0
        for x in (seam - 1e-9, seam, seam + 1e-9):
            assert abs(specfun.bessel_j0(x) - sc.j0(x)) < 1e-12

    def test_even_and_bounded(self, rng):
        x = rng.uniform(-200, 200, 1000)
        assert np.array_equal(specfun.bessel_j0(x), specfun.bessel_j0(-x))
        assert np.all(np.abs(specfun.bessel_j0(x)) <= 1.0)

    def test_non_finite_rejected(self):
        for bad in (math.nan, math.inf):
            with pytest.raises(ValueError):
                specfun.bessel_j0(bad)

    def test_scalar_in_scalar_out(self):
        assert isinstance(specfun.bessel_j0(1.5), float)

    def test_zeros_against_reference(self):
        ours = specfun.bessel_j0_zeros(200)
        assert np.max(np.abs(ours - sc.jn_zeros(0, 200))) < 1e-11

    def test_derivative_is_minus_j1(self, rng):
        h = 1e-5
        x = rng.uniform(-30, 30, 100)
        fd = (specfun.bessel_j0(x + h) - specfun.bessel_j0(x - h)) / (2 * h)
        assert np.max(np.abs(fd + specfun.bessel_j1(x))) < 1e-6

    def test_j1_against_reference(self):
        x = np.linspace(-60, 60, 2001)
        assert np.max(np.abs(specfun.bessel_j1(x) - sc.j1(x))) < 1e-12


class TestBesselI0:
    def test_at_zero(self):
        assert specfun.bessel_i0(0.0) == 1.0

    def test_at_one(self):
        assert abs(specfun.bessel_i0(1.0) - 1.2660658777520084) < 1e-15

    def test_asymptotic_at_fifty(self):
        leading = math.exp(50) / math.sqrt(2 * math.pi * 50)
        assert abs(specfun.bessel_i0(50.0) / leading - 1) < 0.01

    def test_scaled_against_reference(self):
        x = np.concatenate([np.linspace(-40, 40, 2001), np.geomspace(40, 1e6, 200)])
        rel = np.abs(specfun.bessel_i0e(x) / sc.i0e(x) - 1)
        assert rel.max() < 1e-13

    def test_even_and_at_least_one(self, rng):
        x = rng.uniform(-700, 700, 1000)
        assert np.array_equal(specfun.bessel_i0(x), specfun.bessel_i0(-x))
        assert np.all(specfun.bessel_i0(x) >= 1.0)

    def test_overflow_signalled(self):
        with pytest.raises(OverflowSignal):
            specfun.bessel_i0(800.0)
        assert specfun.bessel_i0e(800.0) > 0

    def test_log_i0_large(self):
        x = 5000.0
        assert abs(specfun.log_bessel_i0(x) - (x + math.log(sc.i0e(x)))) < 1e-10


class TestLaguerre:
    def test_degree_zero(self):
        assert specfun.laguerre(0, 0, 7.3) == 1.0

    def test_degree_one(self):
        assert specfun.laguerre(1, 0, 2.0) == -1.0

    def test_degree_two(self):
        assert abs(specfun.laguerre(2, 0, 2.0) + 1.0) < 1e-15

    def test_recurrence_matches_exact_series(self, rng):
        for _ in range(300):
            n = int(rng.integers(0, 31))
            k = int(rng.integers(0, 8))
            x = float(rng.uniform(0, 50))
            exact = exact_laguerre(n, k, x)
            assert abs(specfun.laguerre(n, k, x) - exact) <= 1e-10 * abs(exact)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(0, 30), k=st.integers(0, 5), x=st.floats(0.0, 50.0))
    def test_against_reference(self, n, k, x):
        ref = sc.eval_genlaguerre(n, k, x)
        scale = max(abs(ref), sum(abs(math.comb(n + k, n - i) * x**i / math.factorial(i)) for i in range(n + 1)))
        assert abs(specfun.laguerre(n, k, x) - ref) <= 1e-12 * scale

    def test_all_orders_shape(self):
        x = np.linspace(0, 5, 7)
        assert specfun.laguerre_all(10, 2, x).shape == (11, 7)

    def test_scaled_functions(self):
        x = np.array([0.0, 1.0, 40.0, 900.0])
        ours = specfun.laguerre_scaled_all(60, x)
        for j in (0, 5, 60):
            ref = np.exp(-x / 2) * sc.eval_laguerre(j, x)
            assert np.allclose(ours[j], ref, rtol=1e-9, atol=1e-14)

    def test_degree_cap(self):
        with pytest.raises(ValueError):
            specfun.laguerre(501, 0, 1.0)


class TestGammaHalf:
    def test_values(self):
        assert abs(specfun.gamma_half(0) - 1.7724538509055159) < 1e-15
        assert abs(specfun.gamma_half(1) - 0.8862269254527580) < 1e-15
        assert abs(specfun.gamma_half(5) / 52.34277778455352 - 1) < 1e-15

    def test_recurrence(self):
        for m in range(1, 150):
            assert abs(specfun.gamma_half(m) / ((m - 0.5) * specfun.gamma_half(m - 1)) - 1) < 1e-14

    def test_against_lgamma(self):
        for m in (10, 50, 170):
            assert abs(math.log(specfun.gamma_half(m)) - math.lgamma(m + 0.5)) < 1e-12

    def test_overflow(self):
        with pytest.raises(OverflowSignal):
            specfun.gamma_half(200)
        with pytest.raises(ValueError):
            specfun.gamma_half(201)


class TestHypergeometric:
    def test_power_identity_example(self):
        assert abs(specfun.gauss_2f1(0.5, 1.0, 1.0, 0.36) - 1.25) < 1e-14

    def test_zero_argument(self):
        assert specfun.gauss_2f1(3.7, -1.2, 2.5, 0.0) == 1.0

    def test_half_parameters(self):
        expected = (1 - 0.21557) ** -0.5
        assert abs(specfun.gauss_2f1(0.5, 0.5, 0.5, 0.21557) / expected - 1) < 1e-14
        assert abs(expected - 1.129075) < 1e-6

    def test_direct_series_agrees(self):
        z = 0.21557
        # the plain series stops once its tail bound meets the default 1e-12 budget
        assert abs(specfun.hyp2f1_series(0.5, 0.5, 0.5, z) / specfun.gauss_2f1(0.5, 0.5, 0.5, z) - 1) < 1e-12

    def test_power_identity_random(self, rng):
        for _ in range(200):
            a, b, z = rng.uniform(-3, 3), rng.uniform(0.1, 5), rng.uniform(0, 0.9)
            assert abs(specfun.gauss_2f1(a, b, b, z) / (1 - z) ** -a - 1) < 1e-10

    @pytest.mark.parametrize("a,b,c,z", [
        (0.5, 1.0, 1.0, -3.0),
        (10.5, 11.0, 1.0, 0.95),
        (30.5, 31.0, 1.0, 0.6),
        (5.5, 5.5, 0.5, 0.99),
        (20.5, 20.5, 1.5, 0.3),
        (-7.0, 2.5, 1.0, 0.97),
        (0.25, 0.5, 2.0, 0.999),
    ])
    def test_against_reference(self, a, b, c, z):
        assert abs(specfun.gauss_2f1(a, b, c, z) / sc.hyp2f1(a, b, c, z) - 1) < 1e-10

    def test_one_minus_z_keyword(self):
        z = 1 - 1e-6
        assert abs(specfun.gauss_2f1(0.5, 1.0, 1.0, z, one_minus_z=1e-6) - 1e3) < 1e-9

    def test_divergence_signal(self):
        with pytest.raises(HypergeometricDivergence):
            specfun.gauss_2f1(1.0, 1.0, 1.0, 1 - 1e-12)

    def test_nonpositive_integer_c(self):
        with pytest.raises(ValueError):
            specfun.gauss_2f1(1.0, 1.0, -2.0, 0.5)
