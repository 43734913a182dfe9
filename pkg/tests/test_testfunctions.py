import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_frac.kernels import FracParams, MuFamily, hadamard_right_integral
from hadamard_frac.special import gamma_fn
from hadamard_frac.testfunctions import (
    CutoffParams,
    MuParams,
    TestFunction,
    cutoff_constants,
    cutoff_eval,
    cutoff_grad_norm,
    cutoff_laplacian,
    default_exponents,
    k22_density,
    laplacian_of_power,
    mu_eval,
    mu_right_image,
    mu_right_image_tderiv,
    phi_weighted_image_at_a,
    psi,
    psi_derivatives,
)

E = math.e
M2 = MuParams.from_T(1.0, E, 2.0)


class TestMu:
    def test_values(self):
        assert mu_eval(M2, 1.0) == 1.0
        assert mu_eval(M2, E) == 0.0
        assert mu_eval(M2, math.sqrt(E)) == pytest.approx(0.25, rel=1e-15)

    def test_outside(self):
        with pytest.raises(ValueError):
            mu_eval(M2, 3.0)
        with pytest.raises(ValueError):
            mu_eval(M2, 0.5)

    def test_param_errors(self):
        with pytest.raises(ValueError):
            MuParams(1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            MuParams(1.0, math.inf, 2.0)
        with pytest.raises(ValueError):
            MuParams.from_T(2.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            mu_right_image(M2, 0.0, 1.5)
        with pytest.raises(ValueError):
            mu_right_image_tderiv(M2, -1.0, 1.5)

    def test_huge_horizon(self):
        m = MuParams(1.0, 1e4, 3.0)
        assert m.T == math.inf
        assert mu_right_image(m, 0.5, 1.0) > 0

    def test_image_examples(self):
        assert mu_right_image(M2, 0.5, E) == 0.0
        assert mu_right_image(M2, 0.5, math.sqrt(E)) == pytest.approx(gamma_fn(3) / gamma_fn(3.5) * 0.5**2.5, rel=1e-14)
        assert mu_right_image_tderiv(M2, 0.5, math.sqrt(E)) == pytest.approx(-0.5319230405352436, rel=1e-13)

    def test_sigma_one_elementary(self):
        # int_t^T (1 - ln s)^2 ds/s = (1 - ln t)^3 / 3
        for t in (1.0, 1.4, 2.2):
            assert mu_right_image(M2, 1.0, t) == pytest.approx((1 - math.log(t)) ** 3 / 3, rel=1e-14)

    @pytest.mark.parametrize("kappa", [1.0, 2.0, 5.0])
    @pytest.mark.parametrize("sigma", [0.25, 0.5, 0.75])
    def test_image_vs_quadrature(self, kappa, sigma):
        a, T = 1.5, 12.0
        m = MuParams.from_T(a, T, kappa)
        p = FracParams(sigma, a, T)
        for t in np.geomspace(a, T * 0.999, 10):
            assert mu_right_image(m, sigma, t) == pytest.approx(hadamard_right_integral(MuFamily(kappa), p, t), rel=1e-9)

    @pytest.mark.parametrize("kappa, sigma", [(2.0, 0.5), (1.0, 0.3), (3.5, 1.2)])
    def test_tderiv_finite_difference_order(self, kappa, sigma):
        m = MuParams.from_T(1.0, E, kappa)
        x = 0.4
        exact = mu_right_image_tderiv(m, sigma, math.exp(x))
        errs = []
        for h in (1e-2, 5e-3):
            fd = (mu_right_image(m, sigma, math.exp(x + h)) - mu_right_image(m, sigma, math.exp(x - h))) / (2 * h)
            errs.append(abs(fd - exact))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(1.0, 6.0), st.floats(0.05, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone(self, kappa, sigma, u, v):
        m = MuParams(1.0, 2.0, kappa)
        t1, t2 = sorted((math.exp(2 * u), math.exp(2 * v)))
        assert mu_eval(m, t1) >= mu_eval(m, t2)
        assert mu_right_image(m, sigma, t1) >= mu_right_image(m, sigma, t2)
        assert mu_right_image_tderiv(m, sigma, t1) <= 0.0

    def test_phi_factor(self):
        tf = TestFunction(M2, CutoffParams(1.0, 4, 3))
        assert phi_weighted_image_at_a(tf, 0.5) == pytest.approx(gamma_fn(3) / gamma_fn(3.5), rel=1e-14)
        # equals (J_T^{1-alpha} mu)(a)
        q = hadamard_right_integral(MuFamily(2.0), FracParams(0.5, 1.0, E), 1.0)
        assert phi_weighted_image_at_a(tf, 0.5) == pytest.approx(q, rel=1e-12)
        assert phi_weighted_image_at_a(tf, 1 - 1e-9) == pytest.approx(1.0, rel=1e-8)
        with pytest.raises(ValueError):
            phi_weighted_image_at_a(tf, 1.0)

    def test_default_exponents(self):
        assert default_exponents(0.5, 2.0) == (3, 6)
        for alpha, p in [(0.3, 1.2), (0.9, 5.0)]:
            k, ell = default_exponents(alpha, p)
            q = p / (p - 1)
            assert k > alpha * q and ell > 2 * q


class TestCutoff:
    def test_partition(self):
        c = CutoffParams(3.0, 4, 2)
        assert cutoff_eval(c, 1.5) == 1.0
        assert cutoff_eval(c, 3.0) == 1.0
        assert cutoff_eval(c, 6.0) == 0.0
        assert cutoff_eval(c, 9.0) == 0.0
        assert 0.0 < cutoff_eval(c, 4.5) < 1.0
        assert psi(1.5) == pytest.approx(0.5, abs=1e-15)
        assert cutoff_grad_norm(c, 1.5) == 0.0 and cutoff_laplacian(c, 1.5) == 0.0
        assert cutoff_laplacian(c, 0.0) == 0.0

    def test_param_errors(self):
        for args in [(0.0, 2, 1), (1.0, 1, 1), (1.0, 2.5, 1), (1.0, 2, 0)]:
            with pytest.raises(ValueError):
                CutoffParams(*args)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 3.0))
    def test_psi_properties(self, r):
        v, d1, d2 = psi_derivatives(r)
        assert 0.0 <= v <= 1.0
        assert d1 <= 0.0
        assert psi(3.0 - r) == pytest.approx(1.0 - v, abs=1e-12)

    def test_smooth_seams(self):
        # every derivative is flat at the seams
        for r0 in (1.0, 2.0):
            _, d1, d2 = psi_derivatives(np.array([r0 - 1e-2, r0 + 1e-2]))
            assert np.all(np.abs(d1) < 1e-20) and np.all(np.abs(d2) < 1e-20)
        assert np.all(np.isfinite(psi_derivatives(np.linspace(0, 3, 10001))[2]))

    def test_derivatives_match_finite_differences(self):
        r = np.linspace(1.05, 1.95, 19)
        h = 1e-5
        v, d1, d2 = psi_derivatives(r)
        np.testing.assert_allclose(d1, (psi(r + h) - psi(r - h)) / (2 * h), atol=1e-7)
        np.testing.assert_allclose(d2, (psi(r + h) - 2 * v + psi(r - h)) / h**2, atol=1e-3)

    def test_constants_scale_free(self):
        for N in (1, 3):
            g1, l1 = cutoff_constants(N, 1.0)
            g10, l10 = cutoff_constants(N, 10.0)
            g100, l100 = cutoff_constants(N, 100.0)
            assert g10 == pytest.approx(g1, rel=1e-3) and g100 == pytest.approx(g1, rel=1e-3)
            assert l10 == pytest.approx(l1, rel=1e-3) and l100 == pytest.approx(l1, rel=1e-3)

    @pytest.mark.parametrize("N, ell", [(1, 2), (2, 4), (3, 6), (5, 3)])
    def test_laplacian_of_power_fd(self, N, ell):
        R = 2.0
        c = CutoffParams(R, ell, N)
        r = np.linspace(R * 1.04, R * 1.96, 20)
        h = 1e-4
        f = lambda s: cutoff_eval(c, s) ** ell  # noqa: E731
        fd = (f(r + h) - 2 * f(r) + f(r - h)) / h**2 + (N - 1) / r * (f(r + h) - f(r - h)) / (2 * h)
        np.testing.assert_allclose(laplacian_of_power(c, r), fd, atol=1e-6)

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_laplacian_integrates_to_zero(self, N):
        c = CutoffParams(1.5, 4, N)
        x, w = np.polynomial.legendre.leggauss(40)
        edges = np.linspace(1.5, 3.0, 61)
        h = np.diff(edges)[:, None] / 2
        s = edges[:-1, None] + h * (x + 1)
        dens = laplacian_of_power(c, s) * s ** (N - 1)
        assert abs(np.sum(dens * w * h)) < 1e-9 * np.sum(np.abs(dens) * w * h)

    def test_k22_density_identity(self):
        c = CutoffParams(1.0, 7, 3)
        p = 2.0
        r = np.linspace(1.1, 1.9, 9)
        direct = cutoff_eval(c, r) ** (-c.ell / (p - 1)) * np.abs(laplacian_of_power(c, r)) ** (p / (p - 1))
        np.testing.assert_allclose(k22_density(c, p, r), direct, rtol=1e-10)
        assert np.all(k22_density(c, p, np.array([0.5, 2.0, 2.5])) == 0.0)

    def test_power_bound(self):
        # |Delta xi^ell| <= C R^-2 xi^(ell-2) on the annulus, with C = ell((ell-1)Cg^2 + CD)
        for R in (1.0, 10.0):
            c = CutoffParams(R, 5, 3)
            Cg, CD = cutoff_constants(3, 1.0, n=20000)
            r = np.linspace(R, 2 * R, 2003)[1:-1]
            lhs = np.abs(laplacian_of_power(c, r))
            rhs = c.ell * ((c.ell - 1) * Cg**2 + CD) / R**2 * cutoff_eval(c, r) ** (c.ell - 2)
            assert np.all(lhs <= rhs * (1 + 1e-6))
