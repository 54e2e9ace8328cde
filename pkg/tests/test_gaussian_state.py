import math

import numpy as np
import pytest

from conftest import SQRT3, random_valid_alpha_beta, state
from wignerclass import gaussian_state as gs
from wignerclass.errors import DistributionValued, Marginal, NotPositive, UncertaintyViolated
from wignerclass.gaussian_state import GMatrix, StateKind


def trapezoid_2d(f, half_q, half_p, h):
    q = np.arange(-half_q, half_q + h / 2, h)
    p = np.arange(-half_p, half_p + h / 2, h)
    qq, pp = np.meshgrid(q, p, indexing="ij")
    return float(np.sum(f(qq, pp)) * h * h)


class TestValidate:
    def test_vacuum(self):
        s = gs.validate(GMatrix(1.0, 0.0, 1.0))
        assert s.delta == 1.0 and s.alpha == 1.0 and s.beta == 1.0

    def test_isotropic_thermal(self):
        s = gs.validate(GMatrix(0.25, 0.0, 0.25))
        assert s.delta == 1 / 16 and s.alpha == 2.0 and s.beta == 2.0

    def test_uncertainty_violation(self):
        with pytest.raises(UncertaintyViolated, match="uncertainty: det G must be ≤ 1"):
            gs.validate(GMatrix(4.0, 0.0, 4.0))

    @pytest.mark.parametrize("g", [GMatrix(-1.0, 0.0, -1.0), GMatrix(1.0, 2.0, 1.0), GMatrix(0.0, 0.0, 0.0)])
    def test_not_positive(self, g):
        with pytest.raises(NotPositive):
            gs.validate(g)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            GMatrix(math.nan, 0.0, 1.0)

    def test_parse(self):
        assert GMatrix.parse("0.25, 0, 4") == GMatrix(0.25, 0.0, 4.0)
        with pytest.raises(ValueError):
            GMatrix.parse("1,2")

    def test_product_invariant(self, rng):
        for _ in range(200):
            a, b = random_valid_alpha_beta(rng)
            s = state(a, b, rng.uniform(0, math.pi))
            assert s.alpha >= s.beta > 0
            assert abs(s.alpha * s.beta - 1 / math.sqrt(s.delta)) < 1e-12 * s.alpha * s.beta


class TestNormalForm:
    def test_diagonal(self):
        nf = gs.normal_form(GMatrix(0.25, 0.0, 4.0))
        assert (nf.alpha, nf.beta, nf.theta) == (2.0, 0.5, 0.0)

    def test_rotated_thirty_degrees(self):
        theta = math.radians(30)
        nf = state(2.0, 0.5, theta).normal
        assert abs(nf.alpha - 2) < 1e-12 and abs(nf.beta - 0.5) < 1e-12
        assert abs(math.remainder(nf.theta - theta, math.pi)) < 1e-12

    def test_isotropic_theta_zero(self):
        nf = gs.normal_form(GMatrix(1.0, 0.0, 1.0))
        assert (nf.alpha, nf.beta, nf.theta) == (1.0, 1.0, 0.0)

    def test_reconstruction(self, rng):
        for _ in range(100):
            a, b = random_valid_alpha_beta(rng)
            s = state(a, b, rng.uniform(-4, 4))
            r = s.normal.rotation()
            d = r.T @ s.g.as_array() @ r
            target = np.diag([s.alpha**-2, s.beta**-2])
            assert np.max(np.abs(d - target)) < 1e-12 * max(1.0, s.beta**-2)
            assert 0 <= s.normal.theta < math.pi


class TestClassify:
    def test_thermal_classical(self):
        c = gs.classify(state(SQRT3, SQRT3))
        assert c.kind is StateKind.CLASSICAL and not c.marginal

    def test_squeezed_strongly_nonclassical(self):
        c = gs.classify(state(2, 0.8))
        assert c.kind is StateKind.STRONGLY_NONCLASSICAL and not c.marginal

    def test_squeezed_vacuum_marginal(self):
        c = gs.classify(state(2, 0.5))
        assert c.kind is StateKind.STRONGLY_NONCLASSICAL and c.marginal
        assert c.describe() == "StronglyNonclassical, marginal: squeezed vacuum (αβ=1)"

    def test_beta_one_marginal_classical(self):
        c = gs.classify(state(2, 1))
        assert c.kind is StateKind.CLASSICAL and c.marginal

    def test_vacuum(self):
        c = gs.classify(state(1, 1))
        assert c.kind is StateKind.CLASSICAL and c.marginal and "vacuum" in c.note

    def test_never_weakly_nonclassical(self, rng):
        seen = set()
        for _ in range(10000):
            a, b = random_valid_alpha_beta(rng, 5.0)
            s = state(a, b, rng.uniform(0, math.pi))
            kind = gs.classify(s).kind
            seen.add(kind)
            assert kind is not StateKind.WEAKLY_NONCLASSICAL
            assert (kind is StateKind.CLASSICAL) == (s.beta >= 1 - gs.BOUNDARY_EPS)
        assert seen == {StateKind.CLASSICAL, StateKind.STRONGLY_NONCLASSICAL}


class TestWigner:
    def test_vacuum_origin(self):
        assert gs.wigner_eval(state(1, 1), 0, 0) == pytest.approx(1 / math.pi, rel=1e-15)

    def test_squeezed_vacuum_origin(self):
        assert gs.wigner_eval(state(2, 0.5), 0, 0) == pytest.approx(1 / math.pi, rel=1e-15)

    def test_thermal_value(self):
        expected = math.exp(-2 / 3) / (3 * math.pi)
        assert gs.wigner_eval(state(SQRT3, SQRT3), 1, 1) == pytest.approx(expected, rel=1e-14)

    def test_normalization(self, rng):
        for _ in range(20):
            a, b = random_valid_alpha_beta(rng)
            s = state(a, b, rng.uniform(0, math.pi))
            extent = 7.0 * s.alpha
            total = trapezoid_2d(lambda q, p: gs.wigner_eval(s, q, p), extent, extent, s.beta / 3)
            assert abs(total - 1) < 1e-8

    def test_positive(self, rng):
        s = state(3, 0.4, 1.0)
        q, p = rng.uniform(-5, 5, (2, 500))
        assert np.all(gs.wigner_eval(s, q, p) > 0)


class TestFourierTransform:
    def test_origin(self):
        assert gs.wigner_ft(state(2, 0.7, 0.3), 0, 0) == 1.0

    def test_normal_frame(self):
        assert gs.wigner_ft(state(2, 1), 1, 0) == pytest.approx(math.exp(-1), rel=1e-15)

    def test_vacuum(self):
        assert gs.wigner_ft(state(1, 1), 2, 0) == pytest.approx(math.exp(-1), rel=1e-15)

    def test_against_numeric_transform(self):
        s = state(2, 1, 0.4)
        for sigma, tau in [(1.0, 0.0), (0.3, -0.8), (0.0, 1.5)]:
            re = trapezoid_2d(lambda q, p: gs.wigner_eval(s, q, p) * np.cos(tau * p - sigma * q), 14, 14, 0.1)
            assert abs(re - gs.wigner_ft(s, sigma, tau)) < 1e-10


class TestAngularAverage:
    def test_origin(self):
        s = state(2, 0.5)
        assert gs.angular_average(s, 0.0) == pytest.approx(2 / (2 * 0.5), rel=1e-15)

    def test_isotropic(self):
        assert gs.angular_average(state(SQRT3, SQRT3), 3.0) == pytest.approx(2 / 3 * math.exp(-2), rel=1e-14)

    def test_against_angle_quadrature(self):
        s = state(2, 0.5)
        L = 1.0
        chi = np.linspace(0, 2 * math.pi, 400, endpoint=False)
        r = math.sqrt(2 * L)
        direct = np.mean(gs.wigner_eval(s, r * np.cos(chi), r * np.sin(chi))) * 2 * math.pi
        assert abs(gs.angular_average(s, L) - direct) < 1e-10

    def test_rotation_invariant(self, rng):
        for _ in range(100):
            a, b = random_valid_alpha_beta(rng)
            base = gs.angular_average(state(a, b), 0.7)
            rotated = gs.angular_average(state(a, b, rng.uniform(0, math.pi)), 0.7)
            assert abs(rotated / base - 1) < 1e-10


class TestPhi:
    def test_thermal_origin(self):
        assert gs.phi_density(state(SQRT3, SQRT3), 0, 0) == pytest.approx(1.0, rel=1e-15)

    def test_squeezed_is_distribution(self):
        with pytest.raises(DistributionValued):
            gs.phi_density(state(2, 0.9), 0, 0)

    def test_marginal_beta_one(self):
        with pytest.raises(Marginal, match="δ"):
            gs.phi_density(state(1, SQRT3), 0, 0)

    def test_vacuum_marginal(self):
        with pytest.raises(Marginal):
            gs.phi_density(state(1, 1), 0, 0)

    @pytest.mark.parametrize("alpha,beta,theta", [(SQRT3, SQRT3, 0), (2.5, 1.3, 0.6), (3, 2, 2.0)])
    def test_normalization(self, alpha, beta, theta):
        s = state(alpha, beta, theta)
        extent = 9 * math.sqrt(alpha**2 - 1)
        h = math.sqrt(beta**2 - 1) / 4
        total = trapezoid_2d(lambda x, y: gs.phi_density(s, x, y), extent, extent, h) / (2 * math.pi)
        assert abs(total - 1) < 1e-8

    def test_convolution_with_vacuum_gives_wigner(self, rng):
        s = state(2.2, 1.4, 0.5)
        h = 0.04
        axis = np.arange(-12, 12 + h / 2, h)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        phi = gs.phi_density(s, x, y) / (2 * math.pi)
        for q, p in rng.uniform(-2.5, 2.5, (25, 2)):
            kernel = np.exp(-((q - x) ** 2) - (p - y) ** 2) / math.pi
            smoothed = float(np.sum(phi * kernel) * h * h)
            assert abs(smoothed - gs.wigner_eval(s, q, p)) < 1e-6


class TestVarianceAndMean:
    def test_vacuum(self):
        v = gs.variance_matrix(state(1, 1))
        assert (v.var_q, v.cov_qp, v.var_p) == (0.5, 0.0, 0.5)

    def test_diagonal(self):
        v = gs.variance_matrix(gs.validate(GMatrix(0.25, 0.0, 4.0)))
        assert (v.var_q, v.cov_qp, v.var_p) == (2.0, 0.0, 0.125)

    def test_rotated(self, rng):
        theta = 0.8
        v = gs.variance_matrix(state(2, 0.5, theta)).as_array()
        r = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        expected = r @ np.diag([2.0, 0.125]) @ r.T
        assert np.max(np.abs(v - expected)) < 1e-12

    def test_uncertainty(self, rng):
        for _ in range(100):
            a, b = random_valid_alpha_beta(rng)
            v = gs.variance_matrix(state(a, b, rng.uniform(0, 3)))
            assert v.var_q > 0 and v.var_p > 0 and v.det >= 0.25 * (1 - 1e-12)

    def test_mean_photon(self):
        assert gs.mean_photon(state(1, 1)) == 0.0
        assert gs.mean_photon(state(SQRT3, SQRT3)) == pytest.approx(1.0, rel=1e-15)
        assert gs.mean_photon(state(2, 0.5)) == pytest.approx(9 / 16, rel=1e-15)

    def test_mean_rotation_invariant(self, rng):
        for _ in range(100):
            a, b = random_valid_alpha_beta(rng)
            assert abs(gs.mean_photon(state(a, b, rng.uniform(0, 3))) - (a * a + b * b - 2) / 4) < 1e-12


class TestRotation:
    def test_rotated_method(self):
        s = state(2, 0.5)
        r = s.rotated(0.3)
        assert abs(r.normal.theta - 0.3) < 1e-12
        assert r.alpha == pytest.approx(2, rel=1e-14) and r.beta == pytest.approx(0.5, rel=1e-14)
