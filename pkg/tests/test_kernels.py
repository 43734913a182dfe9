import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_frac.kernels import (
    Constant,
    FracParams,
    Function,
    LogGridFunction,
    LogPower,
    LogProduct,
    MuFamily,
    Sampled,
    conjugate_check,
    evaluate_integrand,
    hadamard_caputo_derivative,
    hadamard_left_integral,
    hadamard_right_integral,
    integration_by_parts_residual,
    rl_left_integral,
    rl_right_integral,
)
from hadamard_frac.quadrature import QuadratureSpec
from hadamard_frac.special import gamma_fn, gamma_ratio

E = math.e


def logpow_image(beta, sigma, x):
    return gamma_ratio(beta + 1, beta + sigma + 1) * x ** (beta + sigma)


class TestParams:
    @pytest.mark.parametrize("sigma, a, T", [(0.0, 1, 2), (-1, 1, 2), (0.5, 0.0, 2), (0.5, 2, 2), (0.5, 2, 1), (0.5, 1, math.inf)])
    def test_invalid(self, sigma, a, T):
        with pytest.raises(ValueError):
            FracParams(sigma, a, T)

    def test_logpower_and_mu_guards(self):
        with pytest.raises(ValueError):
            LogPower(-1.0)
        with pytest.raises(ValueError):
            MuFamily(0.5)

    def test_grid_endpoints(self):
        g = LogGridFunction.from_function(np.log, 2.0, 50.0, 7)
        assert g.nodes[0] == 2.0 and g.nodes[-1] == 50.0
        assert np.all(np.diff(g.nodes) > 0)
        with pytest.raises(ValueError):
            LogGridFunction(1.0, 2.0, np.array([1.0, np.nan]))


class TestRiemannLiouville:
    def test_constant_sigma_one(self):
        p = FracParams(1.0, 1.0, 3.0)
        assert rl_left_integral(Constant(1), p, 2.5) == pytest.approx(1.5, rel=1e-14)
        assert rl_right_integral(Constant(1), p, 2.5) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("sigma", [0.2, 0.5, 1.0, 2.7])
    def test_constant_power_rule(self, sigma):
        p = FracParams(sigma, 1.0, 4.0)
        c = 2.5
        assert rl_left_integral(Constant(c), p, 3.0) == pytest.approx(c * 2.0**sigma / gamma_fn(sigma + 1), rel=1e-12)
        assert rl_right_integral(Constant(c), p, 3.0) == pytest.approx(c / gamma_fn(sigma + 1), rel=1e-12)

    def test_shifted_power_example(self):
        # f(s) = s - a with a = 1 shifts the a = 0, t = 1 case
        p = FracParams(0.5, 1.0, 3.0)
        val = rl_left_integral(lambda s: s - 1.0, p, 2.0)
        assert val == pytest.approx(gamma_fn(2) / gamma_fn(2.5), rel=1e-12)
        assert val == pytest.approx(0.7522527780636751, rel=1e-12)

    @pytest.mark.parametrize("sigma", [0.3, 1.4])
    def test_reflection(self, sigma):
        a, T = 1.0, 3.0
        p = FracParams(sigma, a, T)
        f = lambda s: np.exp(-s) * (1 + s**2)  # noqa: E731
        reflected = lambda s: f(a + T - s)  # noqa: E731
        for t in (1.3, 2.0, 2.8):
            assert rl_right_integral(f, p, t) == pytest.approx(rl_left_integral(reflected, p, a + T - t), rel=1e-12)

    def test_outside_interval(self):
        with pytest.raises(ValueError):
            rl_left_integral(Constant(1), FracParams(0.5, 1, 2), 2.5)


class TestHadamard:
    def test_constant_sigma_one(self):
        p = FracParams(1.0, 1.0, E)
        assert hadamard_left_integral(Constant(3.0), p, 2.0) == pytest.approx(3 * math.log(2.0), rel=1e-14)
        assert hadamard_right_integral(Constant(1.0), p, 2.0) == pytest.approx(1 - math.log(2.0), rel=1e-14)

    def test_logpower_example(self):
        p = FracParams(0.5, 1.0, E)
        assert hadamard_left_integral(LogPower(1.0), p, E) == pytest.approx(1 / gamma_fn(2.5), rel=1e-12)
        assert hadamard_left_integral(LogPower(1.0), p, E) == pytest.approx(0.7522527780636751, rel=1e-12)

    def test_mu_example(self):
        p = FracParams(0.5, 1.0, E)
        val = hadamard_right_integral(MuFamily(2.0), p, math.sqrt(E))
        assert val == pytest.approx(gamma_fn(3) / gamma_fn(3.5) * 0.5**2.5, rel=1e-12)
        assert val == pytest.approx(0.10638460810704876, rel=1e-12)

    @pytest.mark.parametrize("beta", [-0.5, 0.0, 0.5, 1.0, 2.5])
    @pytest.mark.parametrize("sigma", [0.1, 0.3, 0.5, 1.0, 1.7])
    def test_logpower_eigenrelation(self, beta, sigma):
        a, T = 2.0, 20.0
        p = FracParams(sigma, a, T)
        for t in np.geomspace(a * 1.01, T, 10):
            x = math.log(t / a)
            assert hadamard_left_integral(LogPower(beta), p, t) == pytest.approx(logpow_image(beta, sigma, x), rel=1e-10)

    def test_degenerate_endpoints(self):
        p = FracParams(0.4, 1.0, E)
        assert hadamard_left_integral(MuFamily(2), p, 1.0) == 0.0
        assert hadamard_right_integral(LogPower(0.5), p, E) == 0.0

    @pytest.mark.parametrize("sigma", [0.3, 0.5, 1.5])
    def test_boundary_vanishing(self, sigma):
        a, T = 1.0, E
        p = FracParams(sigma, a, T)
        delta = 1e-4
        bound = 10 * delta ** min(sigma, 1.0)
        assert abs(hadamard_left_integral(Constant(1), p, a * (T / a) ** delta)) < bound
        assert abs(hadamard_right_integral(MuFamily(2), p, T * (a / T) ** delta)) < bound

    def test_error_estimate_returned(self):
        res = hadamard_left_integral(MuFamily(3), FracParams(0.3, 1, E), 2.0, with_error=True)
        assert res.error <= 1e-12 * abs(res.value)

    def test_sampled_matches_closed_form(self):
        a, T = 1.0, E
        g = LogGridFunction.from_function(lambda t: np.log(t / a) ** 2, a, T, 65)
        p = FracParams(0.5, a, T)
        for t in (1.5, 2.0, E):
            exact = logpow_image(2.0, 0.5, math.log(t / a))
            assert hadamard_left_integral(Sampled(g), p, t) == pytest.approx(exact, rel=1e-6)

    def test_function_tag_with_endpoint_factor(self):
        a, T = 1.0, E
        p = FracParams(0.7, a, T)
        f = Function(lambda t: np.ones_like(t), beta_a=0.5)
        assert hadamard_left_integral(f, p, 2.0) == pytest.approx(logpow_image(0.5, 0.7, math.log(2.0)), rel=1e-12)

    def test_adaptive_rule_agrees(self):
        p = FracParams(0.35, 1.0, E)
        q = QuadratureSpec(rule="adaptive-graded")
        assert hadamard_right_integral(MuFamily(2.5), p, 1.7, q) == pytest.approx(hadamard_right_integral(MuFamily(2.5), p, 1.7), rel=1e-12)


class TestCaputo:
    def test_constant_vanishes(self):
        assert hadamard_caputo_derivative(Constant(5.0), 0.4, FracParams(1, 1, E), 2.0) == 0.0

    @pytest.mark.parametrize("beta, expected", [(1.0, 1.1283791670955126), (0.5, 0.886226925452758)])
    def test_logpower_examples(self, beta, expected):
        val = hadamard_caputo_derivative(LogPower(beta), 0.5, FracParams(1, 1, E), E)
        assert val == pytest.approx(expected, rel=1e-12)
        assert val == pytest.approx(gamma_ratio(beta + 1, beta + 0.5), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
    @pytest.mark.parametrize("beta, sigma", [(0.0, 0.5), (1.0, 0.3), (0.5, 1.2)])
    def test_inversion(self, alpha, beta, sigma):
        # D^alpha J^sigma (ln t/a)^beta = c (ln t/a)^(beta + sigma - alpha)
        c = gamma_ratio(beta + 1, beta + sigma + 1)
        image = LogProduct(c, beta + sigma, 0.0)
        a, T = 1.0, 5.0
        for t in (1.5, 3.0, 5.0):
            x = math.log(t / a)
            expected = c * gamma_ratio(beta + sigma + 1, beta + sigma + 1 - alpha) * x ** (beta + sigma - alpha)
            val = hadamard_caputo_derivative(image, alpha, FracParams(1, a, T), t)
            assert val == pytest.approx(expected, rel=1e-8)

    def test_sampled_second_order(self):
        # t = e^x in log time; D^alpha e^x = x^(1-alpha) E_{1,2-alpha}(x)
        a, T, alpha = 1.0, E, 0.5
        x = math.log(2.0)
        exact = sum(x ** (k + 1 - alpha) / gamma_fn(k + 2 - alpha) for k in range(40))
        errs = []
        for n in (33, 65, 129):
            g = LogGridFunction.from_function(lambda t: t, a, T, n)
            errs.append(abs(hadamard_caputo_derivative(Sampled(g), alpha, FracParams(1, a, T), 2.0) - exact))
        assert errs[-1] < 1e-4
        assert errs[1] / errs[2] > 3.5 and errs[0] / errs[1] > 3.5

    def test_mu_derivative(self):
        # D^alpha mu with mu a polynomial in ln(T/t)
        a, T = 1.0, E
        val = hadamard_caputo_derivative(MuFamily(2.0), 0.5, FracParams(1, a, T), 2.0)
        # mu = (1 - x)^2 = 1 - 2x + x^2
        x = math.log(2.0)
        expected = -2 * gamma_ratio(2, 1.5) * x**0.5 + gamma_ratio(3, 2.5) * x**1.5
        assert val == pytest.approx(expected, rel=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            hadamard_caputo_derivative(LogPower(1), 1.0, FracParams(1, 1, E), 2.0)
        with pytest.raises(ValueError):
            hadamard_caputo_derivative(LogPower(-0.5), 0.5, FracParams(1, 1, E), 2.0)
        with pytest.raises(TypeError):
            hadamard_caputo_derivative(Function(np.exp), 0.5, FracParams(1, 1, E), 2.0)


class TestIdentities:
    def test_conjugation_trivial(self):
        p = FracParams(1.0, 1.0, E)
        lhs, rhs = conjugate_check(Constant(1), p, 2.0)
        assert lhs == pytest.approx(math.log(2.0), rel=1e-14)
        assert rhs == pytest.approx(math.log(2.0), rel=1e-14)

    def test_conjugation_example(self):
        p = FracParams(0.3, 1.0, E)
        t = math.exp(0.7)
        lhs, rhs = conjugate_check(LogPower(2.0), p, t)
        exact = logpow_image(2.0, 0.3, 0.7)
        assert lhs == pytest.approx(exact, rel=1e-10)
        assert rhs == pytest.approx(exact, rel=1e-10)

    def test_conjugation_sampled(self):
        g = LogGridFunction.from_function(lambda t: 1 + 0.3 * t, 1.0, E, 17)
        lhs, rhs = conjugate_check(Sampled(g), FracParams(0.6, 1.0, E), 2.2)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(
        st.sampled_from([Constant(1.0), LogPower(0.5), LogPower(2.0), MuFamily(1.0), MuFamily(2.5)]),
        st.floats(0.1, 2.5),
        st.floats(0.05, 1.0),
    )
    def test_conjugation_property(self, f, sigma, frac):
        a, T = 1.5, 9.0
        t = a * (T / a) ** frac
        lhs, rhs = conjugate_check(f, FracParams(sigma, a, T), t)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_ibp_trivial(self):
        lhs, rhs = integration_by_parts_residual(Constant(1), Constant(1), FracParams(1.0, 1.0, E), return_sides=True)
        assert lhs == pytest.approx(0.5, rel=1e-13)
        assert rhs == pytest.approx(0.5, rel=1e-13)

    def test_ibp_example(self):
        lhs, rhs = integration_by_parts_residual(LogPower(1), MuFamily(2), FracParams(0.5, 1.0, E), return_sides=True)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)

    def test_ibp_sampled(self):
        rng = np.random.default_rng(3)
        coeffs = rng.normal(size=3)
        g = LogGridFunction.from_function(lambda t: coeffs[0] + coeffs[1] * np.sin(t) + coeffs[2] * t**2, 1.0, E, 17)
        lhs, rhs = integration_by_parts_residual(Sampled(g), LogPower(0.5), FracParams(0.3, 1.0, E), return_sides=True)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_evaluate_integrand():
    p = FracParams(0.5, 1.0, E)
    t = np.array([1.0, 2.0, E])
    np.testing.assert_allclose(evaluate_integrand(MuFamily(2), p, t), (1 - np.log(t)) ** 2, atol=1e-15)
    np.testing.assert_allclose(evaluate_integrand(LogPower(1.5), p, t), np.log(t) ** 1.5)
