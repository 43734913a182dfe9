"""Composite Gauss-Jacobi quadrature for integrands with algebraic endpoint factors.

The central routine integrates

    coef * prod_i (side_i * (v - root_i))**exp_i * corr_i(v)**exp_i * smooth(v)

over ``[lo, hi]``. Factors whose root sits on an endpoint are folded into the
Jacobi weight of the panel touching that endpoint, so endpoint singularities
are integrated exactly. Roots outside the interval are evaluated pointwise and,
in the graded rule, the mesh is refined geometrically toward them.

Every result carries an error estimate obtained by doubling the node count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "ENV_POINTS",
    "Factor",
    "QuadResult",
    "QuadratureError",
    "QuadratureSpec",
    "default_points",
    "integrate_factored",
    "jacobi_rule",
]

ENV_POINTS = "HADAMARD_FRAC_QUAD_POINTS"
RULES = ("gauss-jacobi", "adaptive-graded")

_MAX_DOUBLINGS = 4
_GRADING_RATIO = 1.0
_MAX_PANELS = 4000


def default_points() -> int:
    raw = os.environ.get(ENV_POINTS)
    if raw is None or raw.strip() == "":
        return 16
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_POINTS} must be an integer, got {raw!r}") from None
    if n < 4:
        raise ValueError(f"{ENV_POINTS} must be >= 4, got {n}")
    return n


@dataclass(frozen=True)
class QuadratureSpec:
    """Which rule to use, how many nodes per panel to start from, and the target."""

    rule: str = "gauss-jacobi"
    points: int = field(default_factory=default_points)
    rel_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise ValueError(f"unknown quadrature rule {self.rule!r}; expected one of {RULES}")
        if int(self.points) != self.points or self.points < 4:
            raise ValueError(f"points must be an integer >= 4, got {self.points!r}")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")


class QuadResult(NamedTuple):
    value: float
    error: float


class QuadratureError(ArithmeticError):
    """Raised when node doubling fails to reach the requested tolerance."""

    def __init__(self, message: str, value: float, error: float):
        super().__init__(f"{message} (value={value!r}, error estimate={error!r})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class Factor:
    """``(side * (v - root))**exponent * corr(v)**exponent``.

    ``corr`` must be positive and smooth on the integration interval; it is used
    to express non-linear factors such as ``ln(s/a) = (s - a) * [ln(s/a)/(s - a)]``.
    """

    root: float
    exponent: float
    side: int = 1
    corr: Callable[[np.ndarray], np.ndarray] | None = None

    def base(self, v: np.ndarray) -> np.ndarray:
        return self.side * (v - self.root)

    def value(self, v: np.ndarray, absorbed: bool) -> np.ndarray:
        out = np.ones_like(v) if absorbed else self.base(v) ** self.exponent
        if self.corr is not None:
            out = out * self.corr(v) ** self.exponent
        return out


@lru_cache(maxsize=4096)
def jacobi_rule(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for the weight ``(1 - x)**a (1 + x)**b``."""
    if a == 0.0 and b == 0.0:
        x, w = roots_legendre(n)
    else:
        x, w = roots_jacobi(n, a, b)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _is_smooth_power(e: float) -> bool:
    return e >= 0.0 and float(e).is_integer()


def _touches(root: float, point: float, scale: float) -> bool:
    return abs(root - point) <= 1e-14 * max(scale, abs(point), 1.0)


def _grade(edges: list[float], singular: Sequence[float], ratio: float) -> list[float]:
    """Split panels until each is no longer than ``ratio`` times its distance to
    every singular point it does not touch."""
    if not singular:
        return edges
    span = edges[-1] - edges[0]
    out: list[float] = []
    stack = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)][::-1]
    while stack:
        x0, x1 = stack.pop()
        h = x1 - x0
        split = None
        worst = ratio
        slack = 1.0 + 1e-9  # keep round-off from re-splitting a panel at its own end
        for z in singular:
            if _touches(z, x0, span) or _touches(z, x1, span):
                continue
            if z < x0:
                d = x0 - z
                if h > worst * d * slack:
                    worst = h / d
                    split = x0 + ratio * d
            elif z > x1:
                d = z - x1
                if h > worst * d * slack:
                    worst = h / d
                    split = x1 - ratio * d
        if split is not None and not x0 < split < x1:
            split = None
        if split is None or len(out) + len(stack) > _MAX_PANELS:
            out.append(x0)
            continue
        stack.append((split, x1))
        stack.append((x0, split))
    out.append(edges[-1])
    return out


def _end_refine(edges: list[float], levels: int, at_lo: bool, at_hi: bool) -> list[float]:
    if levels <= 0:
        return edges
    extra: list[float] = []
    if at_lo:
        lo, x1 = edges[0], edges[1]
        extra += [lo + (x1 - lo) * 0.5**k for k in range(1, levels + 1)]
    if at_hi:
        x0, hi = edges[-2], edges[-1]
        extra += [hi - (hi - x0) * 0.5**k for k in range(1, levels + 1)]
    return sorted(set(edges) | set(extra))


class _Plan(NamedTuple):
    edges: np.ndarray
    lo_pow: float
    hi_pow: float
    lo_factors: tuple[Factor, ...]
    hi_factors: tuple[Factor, ...]
    free_factors: tuple[Factor, ...]


def _evaluate(plan: _Plan, coef: float, smooth, n: int) -> tuple[float, float]:
    edges = plan.edges
    x0 = edges[:-1]
    h = np.diff(edges)
    npan = len(h)
    touch_lo = np.zeros(npan, dtype=bool)
    touch_hi = np.zeros(npan, dtype=bool)
    touch_lo[0] = True
    touch_hi[-1] = True
    total = 0.0
    scale = 0.0
    for tl in (False, True):
        for th in (False, True):
            sel = (touch_lo == tl) & (touch_hi == th)
            if not sel.any():
                continue
            a = plan.hi_pow if th else 0.0
            b = plan.lo_pow if tl else 0.0
            x, w = jacobi_rule(n, a, b)
            hs = h[sel][:, None]
            v = x0[sel][:, None] + hs * (x + 1.0) * 0.5
            vals = np.ones_like(v)
            for f in plan.lo_factors:
                vals = vals * f.value(v, absorbed=tl)
            for f in plan.hi_factors:
                vals = vals * f.value(v, absorbed=th)
            for f in plan.free_factors:
                vals = vals * f.value(v, absorbed=False)
            if smooth is not None:
                vals = vals * smooth(v)
            jac = (hs * 0.5) ** (1.0 + a + b)
            contrib = vals * w * jac
            total += float(contrib.sum())
            scale += float(np.abs(contrib).sum())
    return coef * total, abs(coef) * scale


def integrate_factored(
    lo: float,
    hi: float,
    factors: Sequence[Factor],
    spec: QuadratureSpec,
    *,
    coef: float = 1.0,
    smooth: Callable[[np.ndarray], np.ndarray] | None = None,
    breakpoints: Sequence[float] = (),
    end_grading: int = 0,
) -> QuadResult:
    """Integrate ``coef * prod(factors) * smooth`` over ``[lo, hi]``.

    ``smooth`` must be smooth on each panel delimited by ``breakpoints``.
    ``end_grading`` adds that many geometric refinement levels at both ends,
    for integrands whose endpoint behaviour is a mixture of powers that cannot
    all be folded into one Jacobi weight.
    """
    lo = float(lo)
    hi = float(hi)
    if not hi > lo:
        if hi == lo:
            return QuadResult(0.0, 0.0)
        raise ValueError(f"empty or reversed interval [{lo}, {hi}]")
    span = hi - lo
    lo_f: list[Factor] = []
    hi_f: list[Factor] = []
    free: list[Factor] = []
    singular: list[float] = []
    lo_pow = hi_pow = 0.0
    for f in factors:
        if f.exponent == 0.0:
            continue
        if _touches(f.root, lo, span):
            if f.side != 1:
                raise ValueError(f"factor vanishing at lo={lo} must have side=+1")
            lo_f.append(f)
            lo_pow += f.exponent
        elif _touches(f.root, hi, span):
            if f.side != -1:
                raise ValueError(f"factor vanishing at hi={hi} must have side=-1")
            hi_f.append(f)
            hi_pow += f.exponent
        else:
            if lo < f.root < hi:
                raise ValueError(f"factor root {f.root} lies inside ({lo}, {hi})")
            free.append(f)
            if not _is_smooth_power(f.exponent):
                singular.append(f.root)
    if lo_pow <= -1.0 or hi_pow <= -1.0:
        raise ValueError(
            f"non-integrable endpoint singularity on [{lo}, {hi}]: "
            f"exponents {lo_pow} at lo, {hi_pow} at hi"
        )
    if not _is_smooth_power(lo_pow):
        singular.append(lo)
    if not _is_smooth_power(hi_pow):
        singular.append(hi)

    base = sorted({lo, hi} | {float(b) for b in breakpoints if lo < b < hi})
    base = _end_refine(base, end_grading, True, True)

    def plan_for(edges: list[float]) -> _Plan:
        return _Plan(np.asarray(edges), lo_pow, hi_pow, tuple(lo_f), tuple(hi_f), tuple(free))

    plans = []
    if spec.rule == "gauss-jacobi":
        plans.append(plan_for(base))
    graded = _grade(base, singular, _GRADING_RATIO)
    if spec.rule == "adaptive-graded" or len(graded) != len(base):
        plans.append(plan_for(graded))

    last = None
    for plan in plans:
        n = spec.points
        prev, _ = _evaluate(plan, coef, smooth, n)
        for _ in range(_MAX_DOUBLINGS):
            n *= 2
            cur, scale = _evaluate(plan, coef, smooth, n)
            err = abs(cur - prev)
            if not math.isfinite(cur):
                break
            if err <= spec.rel_tol * scale or scale == 0.0:
                return QuadResult(cur, err)
            prev = cur
        last = (cur, err)
    assert last is not None
    raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", *last)
