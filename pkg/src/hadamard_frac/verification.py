"""Identity suites run by ``hadamard-frac verify``.

Each suite evaluates a handful of identities on fixed parameter grids and
reports the worst relative error. ``inject`` names an identity whose right side
gets its sign flipped, which lets the harness prove it can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .kernels import (
    Constant,
    FracParams,
    LogPower,
    LogProduct,
    MuFamily,
    Sampled,
    LogGridFunction,
    conjugate_check,
    hadamard_caputo_derivative,
    hadamard_left_integral,
    hadamard_right_integral,
    integration_by_parts_residual,
)
from .quadrature import QuadratureSpec
from .special import gamma_ratio
from .testfunctions import MuParams, mu_right_image, mu_right_image_tderiv

__all__ = ["Check", "SUITES", "SuiteResult", "run_suites"]

SUITES = ("conjugation", "ibp", "lemma3", "boundary", "semigroup")
DEFAULT_TOL = 1e-8


@dataclass
class Check:
    identity: str
    lhs: float
    rhs: float
    error: float
    passed: bool
    bound: float | None = None  # set for checks against an absolute bound


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_error(self) -> float:
        """Largest relative error among the relative checks."""
        return max((c.error for c in self.checks if c.bound is None), default=0.0)

    @property
    def worst_bound_ratio(self) -> float | None:
        """Largest ``|lhs - rhs| / bound`` among the absolute checks; must stay <= 1."""
        ratios = [c.error / c.bound if c.bound else (0.0 if c.error == 0.0 else math.inf) for c in self.checks if c.bound is not None]
        return max(ratios, default=None)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "worst_error": self.worst_error,
            "worst_bound_ratio": self.worst_bound_ratio,
            "failed": [c.identity for c in self.checks if not c.passed],
            "checks": len(self.checks),
        }


def _rel(lhs: float, rhs: float, floor: float = 1e-300) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)


class _Recorder:
    def __init__(self, suite: SuiteResult, tol: float, inject: str | None):
        self.suite = suite
        self.tol = tol
        self.inject = inject

    def add(self, identity: str, lhs: float, rhs: float, *, absolute: float | None = None) -> None:
        if self.inject is not None and identity.startswith(self.inject):
            rhs = -rhs if rhs != 0.0 else 1.0
        if absolute is not None:
            err = abs(lhs - rhs)
            ok = err <= absolute
        else:
            err = _rel(lhs, rhs)
            ok = err <= self.tol
        self.suite.checks.append(Check(identity, lhs, rhs, err, bool(ok), absolute))


_CLOSED = {
    "const": Constant(1.5),
    "logpow0.5": LogPower(0.5),
    "logpow2": LogPower(2.0),
    "mu2": MuFamily(2.0),
    "mu3.5": MuFamily(3.5),
}


def _conjugation(rec: _Recorder, q: QuadratureSpec) -> None:
    for name, f in _CLOSED.items():
        for sigma in (0.3, 0.5, 1.7):
            p = FracParams(sigma, 1.0, math.e)
            for t in (math.exp(0.25), math.exp(0.7), math.e):
                lhs, rhs = conjugate_check(f, p, t, q)
                rec.add(f"conjugation[{name}, sigma={sigma}, t={t:.6g}]", lhs, rhs)


def _ibp(rec: _Recorder, q: QuadratureSpec) -> None:
    pairs = [
        ("logpow1", LogPower(1.0), "mu2", MuFamily(2.0)),
        ("const", Constant(1.0), "logpow0.5", LogPower(0.5)),
        ("mu3", MuFamily(3.0), "logpow2", LogPower(2.0)),
    ]
    for sigma in (0.3, 0.5, 0.9):
        p = FracParams(sigma, 1.0, math.e)
        for fn, f, gn, g in pairs:
            lhs, rhs = integration_by_parts_residual(f, g, p, q, return_sides=True)
            rec.add(f"ibp[{fn}, {gn}, sigma={sigma}]", lhs, rhs)


def _lemma3(rec: _Recorder, q: QuadratureSpec) -> None:
    a, T = 1.0, math.e
    L = math.log(T / a)
    for kappa in (1.0, 2.0, 3.5):
        m = MuParams(a, L, kappa)
        dmu = LogProduct(-kappa * L ** (-kappa), 0.0, kappa - 1.0)  # t mu'(t)
        for sigma in (0.3, 0.5, 1.4):
            p = FracParams(sigma, a, T)
            for x in (0.1, 0.5, 0.9):
                t = a * math.exp(x * L)
                quad = hadamard_right_integral(MuFamily(kappa), p, t, q)
                rec.add(f"lemma3-image[kappa={kappa}, sigma={sigma}, t={t:.6g}]", quad, mu_right_image(m, sigma, t))
                # t d/dt commutes with J_T because mu(T) = 0
                quad_d = hadamard_right_integral(dmu, p, t, q)
                rec.add(
                    f"lemma3-derivative[kappa={kappa}, sigma={sigma}, t={t:.6g}]",
                    quad_d,
                    mu_right_image_tderiv(m, sigma, t),
                )


def _boundary(rec: _Recorder, q: QuadratureSpec) -> None:
    a, T = 1.0, math.e
    delta = 1e-4
    ramp = LogGridFunction.from_function(lambda t: 1.0 + 0.5 * (t - a), a, T, 33)
    funcs = {"const": Constant(1.0), "mu2": MuFamily(2.0), "sampled-ramp": Sampled(ramp)}
    sups = {"const": 1.0, "mu2": 1.0, "sampled-ramp": 1.0 + 0.5 * (T - a)}
    for sigma in (0.3, 0.5, 1.5):
        p = FracParams(sigma, a, T)
        bound_scale = 10.0 * delta ** min(sigma, 1.0)
        for name, f in funcs.items():
            bound = bound_scale * sups[name]
            near_a = hadamard_left_integral(f, p, a * (T / a) ** delta, q)
            near_T = hadamard_right_integral(f, p, T * (a / T) ** delta, q)
            rec.add(f"boundary-left[{name}, sigma={sigma}]", near_a, 0.0, absolute=bound)
            rec.add(f"boundary-right[{name}, sigma={sigma}]", near_T, 0.0, absolute=bound)
        rec.add(f"boundary-left-exact[sigma={sigma}]", hadamard_left_integral(Constant(1.0), p, a, q), 0.0, absolute=0.0)
        rec.add(f"boundary-right-exact[sigma={sigma}]", hadamard_right_integral(Constant(1.0), p, T, q), 0.0, absolute=0.0)
    for alpha in (0.3, 0.7):
        p = FracParams(1.0, a, T)
        rec.add(
            f"caputo-constant[alpha={alpha}]",
            hadamard_caputo_derivative(Constant(2.0), alpha, p, math.exp(0.6), q),
            0.0,
            absolute=0.0,
        )


def _semigroup(rec: _Recorder, q: QuadratureSpec) -> None:
    a, T = 1.0, math.e
    for beta in (0.0, 0.5, 2.0):
        for s1, s2 in ((0.3, 0.5), (0.7, 1.2)):
            p = FracParams(s1, a, T)
            # J^{s2} LogPower(beta) is again a log power, so the composition stays closed-form
            inner = LogProduct(gamma_ratio(beta + 1.0, beta + s2 + 1.0), beta + s2, 0.0)
            for x in (0.3, 0.8):
                t = math.exp(x)
                lhs = hadamard_left_integral(inner, p, t, q)
                rhs = hadamard_left_integral(LogPower(beta), FracParams(s1 + s2, a, T), t, q)
                rec.add(f"semigroup[beta={beta}, sigma1={s1}, sigma2={s2}, t={t:.6g}]", lhs, rhs)
        # inner image checked against quadrature too, so the closed form is not taken on faith
        p2 = FracParams(0.5, a, T)
        t = math.exp(0.6)
        rec.add(
            f"semigroup-inner[beta={beta}]",
            hadamard_left_integral(LogPower(beta), p2, t, q),
            gamma_ratio(beta + 1.0, beta + 1.5) * 0.6 ** (beta + 0.5),
        )


_RUNNERS: dict[str, Callable[[_Recorder, QuadratureSpec], None]] = {
    "conjugation": _conjugation,
    "ibp": _ibp,
    "lemma3": _lemma3,
    "boundary": _boundary,
    "semigroup": _semigroup,
}


def run_suites(
    names: tuple[str, ...] | list[str] | None = None,
    *,
    tol: float = DEFAULT_TOL,
    quad: QuadratureSpec | None = None,
    inject: str | None = None,
) -> list[SuiteResult]:
    """Run the named suites (all by default) and return one result per suite."""
    names = SUITES if not names else tuple(names)
    unknown = [n for n in names if n not in _RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; expected a subset of {SUITES}")
    q = QuadratureSpec() if quad is None else quad
    results = []
    for n in names:
        suite = SuiteResult(n)
        _RUNNERS[n](_Recorder(suite, tol, inject), q)
        results.append(suite)
    return results
