"""Exponent regions and sign conditions of the nonexistence theorems.

Every comparison is a plain IEEE comparison on the directly computed bound,
and every bound is an open interval: a ``p`` sitting on an endpoint is
reported as inconclusive. An inconclusive verdict only means the sufficient
conditions fail; it says nothing about existence.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

__all__ = [
    "CriterionReport",
    "DualityCoefficients",
    "ProblemParams",
    "Region",
    "SignFunctionals",
    "comparison_exponents",
    "duality_coefficients",
    "evaluate",
    "region_T1",
    "region_T2",
    "region_combined",
    "sign_functionals",
]

NONEXISTENCE_T1 = "NonexistenceT1"
NONEXISTENCE_T2 = "NonexistenceT2"
NONEXISTENCE_COROLLARY = "NonexistenceCorollary"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProblemParams:
    """Parameters ``(alpha, gamma, N, p, lambda = lambda1 + i lambda2, a)`` of the equation."""

    alpha: float
    gamma: float
    N: int
    p: float
    lambda1: float
    lambda2: float = 0.0
    a: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not math.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite, got {self.gamma!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise ValueError(f"p must be > 1, got {self.p!r}")
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ValueError("lambda must be finite")
        if self.lambda1 == 0.0 and self.lambda2 == 0.0:
            raise ValueError("lambda must be nonzero")
        if not self.a > 0.0:
            raise ValueError(f"a must be > 0, got {self.a!r}")


class DualityCoefficients(NamedTuple):
    r_alpha: float
    s_alpha: float


class SignFunctionals(NamedTuple):
    I1: float
    I2: float


class Region(NamedTuple):
    admissible: bool
    p_lower: float
    p_upper: float


class CombinedRegion(NamedTuple):
    admissible: bool
    p_lower: float
    p_upper: float
    active_branch: str
    p_upper_T1: float
    p_upper_T2: float


def duality_coefficients(alpha: float) -> DualityCoefficients:
    """``(cos(pi alpha/2), sin(pi alpha/2))``, the real and imaginary parts of ``i**alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return DualityCoefficients(math.cos(math.pi * alpha / 2.0), math.sin(math.pi * alpha / 2.0))


def upper_T1(alpha: float, gamma: float, N: int) -> float:
    return 1.0 + 2.0 * (alpha + gamma) / (N * alpha)


def upper_T2(alpha: float, gamma: float) -> float:
    return 1.0 + gamma / alpha


def region_T1(alpha: float, gamma: float, N: int) -> Region:
    admissible = gamma > -alpha and gamma * (N * alpha - 2.0) < 2.0 * alpha
    return Region(admissible, max(1.0, 1.0 + gamma), upper_T1(alpha, gamma, N))


def region_T2(alpha: float, gamma: float) -> Region:
    return Region(gamma > 0.0, 1.0 + gamma, upper_T2(alpha, gamma))


def region_combined(alpha: float, gamma: float, N: int) -> CombinedRegion:
    """Union of the two regions for ``gamma > 0``.

    ``active_branch`` is ``"T1"`` when ``(N-2) gamma < 2 alpha``, ``"T2"`` when
    ``2 alpha < (N-2) gamma`` and ``"tie"`` on equality, where both upper bounds
    coincide (the tie satisfies the T2 predicate ``2 alpha <= (N-2) gamma``).
    """
    admissible = gamma > 0.0 and gamma * (N * alpha - 2.0) < 2.0 * alpha
    u1 = upper_T1(alpha, gamma, N)
    u2 = upper_T2(alpha, gamma)
    lhs = (N - 2) * gamma
    rhs = 2.0 * alpha
    if lhs < rhs:
        branch = "T1"
    elif lhs == rhs:
        branch = "tie"
    else:
        branch = "T2"
    return CombinedRegion(admissible, 1.0 + gamma, max(u1, u2), branch, u1, u2)


def comparison_exponents(alpha: float, N: int) -> dict[str, float | None]:
    """Caputo-case reference exponents: Fujita ``1 + 2/N`` and ``1 + 2(alpha+1)/(N - 2 alpha)``."""
    kn = 1.0 + 2.0 * (alpha + 1.0) / (N - 2.0 * alpha) if N > 2.0 * alpha else None
    return {"fujita": 1.0 + 2.0 / N, "kirane_nabti": kn}


def sign_functionals(pp: ProblemParams, f1_integral: float, f2_integral: float) -> SignFunctionals:
    """``I1 = lambda1 (r int f1 - s int f2)`` and ``I2 = lambda2 (s int f1 + r int f2)``."""
    if not (math.isfinite(f1_integral) and math.isfinite(f2_integral)):
        raise ValueError("initial-data integrals must be finite")
    r, s = duality_coefficients(pp.alpha)
    return SignFunctionals(
        pp.lambda1 * (r * f1_integral - s * f2_integral),
        pp.lambda2 * (s * f1_integral + r * f2_integral),
    )


@dataclass
class CriterionReport:
    verdict: str
    p: float
    p_lower: float
    p_upper_T1: float | None
    p_upper_T2: float | None
    p_upper_combined: float | None
    active_branch: str | None
    conditions: list[tuple[str, bool]]
    margins: dict[str, float]
    sign_functionals: dict[str, float]
    comparison_exponents: dict[str, float | None]
    required: dict[str, list[str]] = field(default_factory=dict)
    failed: list[str] = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["conditions"] = [{"name": n, "holds": ok} for n, ok in self.conditions]
        return d


_DATA = "I1 > 0 or I2 > 0"
_REQUIRED = {
    NONEXISTENCE_T1: [_DATA, "gamma > -alpha", "gamma*(N*alpha-2) < 2*alpha", "p > p_lower_T1", "p < p_upper_T1"],
    NONEXISTENCE_T2: [_DATA, "gamma > 0", "p > p_lower_T2", "p < p_upper_T2"],
    NONEXISTENCE_COROLLARY: [_DATA, "gamma > 0", "gamma*(N*alpha-2) < 2*alpha", "p > p_lower_T2", "p < p_upper_combined"],
}


def _check(conditions: list[tuple[str, bool]], name: str, ok: bool) -> bool:
    conditions.append((name, bool(ok)))
    return bool(ok)


def evaluate(pp: ProblemParams, sf: SignFunctionals) -> CriterionReport:
    """Decide which result, if any, rules out global weak solutions.

    The corollary takes precedence when it applies (it contains the T1 region
    whenever ``gamma > 0``), then T1, then T2.
    """
    a, g, N, p = pp.alpha, pp.gamma, pp.N, pp.p
    conds: list[tuple[str, bool]] = []
    data_ok = _check(conds, _DATA, sf.I1 > 0.0 or sf.I2 > 0.0)

    r1 = region_T1(a, g, N)
    t1 = [
        _check(conds, "gamma > -alpha", g > -a),
        _check(conds, "gamma*(N*alpha-2) < 2*alpha", g * (N * a - 2.0) < 2.0 * a),
        _check(conds, "p > p_lower_T1", p > r1.p_lower),
        _check(conds, "p < p_upper_T1", p < r1.p_upper),
    ]
    r2 = region_T2(a, g)
    t2 = [
        _check(conds, "gamma > 0", g > 0.0),
        _check(conds, "p > p_lower_T2", p > r2.p_lower),
        _check(conds, "p < p_upper_T2", p < r2.p_upper),
    ]
    rc = region_combined(a, g, N)
    tc = [
        g > 0.0,
        g * (N * a - 2.0) < 2.0 * a,
        _check(conds, "p < p_upper_combined", p < rc.p_upper),
    ]
    holds_t1 = all(t1) and data_ok
    holds_t2 = all(t2) and data_ok
    holds_c = all(tc) and p > rc.p_lower and data_ok

    if holds_c:
        verdict = NONEXISTENCE_COROLLARY
    elif holds_t1:
        verdict = NONEXISTENCE_T1
    elif holds_t2:
        verdict = NONEXISTENCE_T2
    else:
        verdict = INCONCLUSIVE

    margins = {
        "p - p_lower_T1": p - r1.p_lower,
        "p_upper_T1 - p": r1.p_upper - p,
        "p - p_lower_T2": p - r2.p_lower,
        "p_upper_T2 - p": r2.p_upper - p,
        "p_upper_combined - p": rc.p_upper - p,
    }
    relevant: set[str] = set()
    if verdict == INCONCLUSIVE:
        relevant = {n for n, ok in conds if not ok}
    note = (
        "sufficient conditions for nonexistence hold"
        if verdict != INCONCLUSIVE
        else "the sufficient conditions for nonexistence are not met; no claim about existence is made"
    )
    return CriterionReport(
        verdict=verdict,
        p=p,
        p_lower=r1.p_lower,
        p_upper_T1=r1.p_upper if r1.admissible else None,
        p_upper_T2=r2.p_upper if r2.admissible else None,
        p_upper_combined=rc.p_upper if rc.admissible else None,
        active_branch=rc.active_branch if rc.admissible else None,
        conditions=conds,
        margins=margins,
        sign_functionals={"I1": sf.I1, "I2": sf.I2},
        comparison_exponents=comparison_exponents(a, N),
        required=_REQUIRED,
        failed=sorted(relevant),
        note=note,
    )
