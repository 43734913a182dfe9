import math

import numpy as np
import pytest

from hadamard_frac.quadrature import (
    ENV_POINTS,
    Factor,
    QuadratureError,
    QuadratureSpec,
    default_points,
    integrate_factored,
    jacobi_rule,
)
from hadamard_frac.special import beta_fn


def test_jacobi_rule_integrates_weight():
    x, w = jacobi_rule(8, -0.5, 0.3)
    exact = 2 ** (1 - 0.5 + 0.3) * beta_fn(0.5, 1.3)
    assert w.sum() == pytest.approx(exact, rel=1e-13)


def test_endpoint_factors_are_exact():
    spec = QuadratureSpec(points=8)
    res = integrate_factored(0.0, 1.0, [Factor(0.0, -0.7, 1), Factor(1.0, 2.5, -1)], spec)
    assert res.value == pytest.approx(beta_fn(0.3, 3.5), rel=1e-14)


def test_external_singularity_uses_graded_panels():
    # (x + 1e-6)**-0.5 on [0, 1]
    spec = QuadratureSpec(points=12)
    res = integrate_factored(0.0, 1.0, [Factor(-1e-6, -0.5, 1)], spec)
    exact = 2 * (math.sqrt(1 + 1e-6) - math.sqrt(1e-6))
    assert res.value == pytest.approx(exact, rel=1e-11)


def test_root_inside_interval_rejected():
    with pytest.raises(ValueError):
        integrate_factored(0.0, 1.0, [Factor(0.5, -0.5, 1)], QuadratureSpec())


def test_non_integrable_endpoint_rejected():
    with pytest.raises(ValueError):
        integrate_factored(0.0, 1.0, [Factor(0.0, -1.0, 1)], QuadratureSpec())


def test_nonconvergence_is_typed():
    spec = QuadratureSpec(points=4, rel_tol=1e-14)
    with pytest.raises(QuadratureError) as info:
        integrate_factored(0.0, 1.0, [], spec, smooth=lambda v: np.sin(400 * v))
    assert math.isfinite(info.value.error)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rule="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(points=3)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)


def test_env_points(monkeypatch):
    monkeypatch.setenv(ENV_POINTS, "24")
    assert default_points() == 24
    assert QuadratureSpec().points == 24
    monkeypatch.setenv(ENV_POINTS, "x")
    with pytest.raises(ValueError):
        default_points()
    monkeypatch.delenv(ENV_POINTS)
    assert default_points() == 16


@pytest.mark.parametrize("rule", ["gauss-jacobi", "adaptive-graded"])
def test_rules_agree(rule):
    spec = QuadratureSpec(rule=rule)
    res = integrate_factored(0.0, 2.0, [Factor(2.0, -0.4, -1)], spec, smooth=np.exp)
    ref = integrate_factored(0.0, 2.0, [Factor(2.0, -0.4, -1)], QuadratureSpec(points=64), smooth=np.exp)
    assert res.value == pytest.approx(ref.value, rel=1e-12)
