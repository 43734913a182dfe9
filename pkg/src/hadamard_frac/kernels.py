"""Riemann-Liouville and Hadamard fractional integrals and the Hadamard-Caputo derivative.

Integrands are described by small tagged values (``Constant``, ``LogPower``,
``MuFamily``, ``Sampled``, ...). Internally every integrand is a sum of
:class:`Piece` objects of the form

    coef * (ln s/a)**beta_a * (ln T/s)**beta_T * smooth(ln s)

which lets each operator fold the algebraic factors into Gauss-Jacobi weights
after mapping the integration interval to its natural coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import Factor, QuadResult, QuadratureSpec, integrate_factored
from .special import gamma_fn

__all__ = [
    "Constant",
    "FracParams",
    "Function",
    "Integrand",
    "LogGridFunction",
    "LogPower",
    "LogProduct",
    "MuFamily",
    "Piece",
    "Sampled",
    "conjugate_check",
    "evaluate_integrand",
    "hadamard_caputo_derivative",
    "hadamard_left_integral",
    "hadamard_right_integral",
    "integration_by_parts_residual",
    "pieces",
    "rl_left_integral",
    "rl_right_integral",
]


def _spec(q: QuadratureSpec | None) -> QuadratureSpec:
    return QuadratureSpec() if q is None else q


@dataclass(frozen=True)
class FracParams:
    """Order ``sigma`` and interval ``[a, T]`` with ``0 < a < T``."""

    sigma: float
    a: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be > 0, got {self.sigma!r}")
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"a must be > 0, got {self.a!r}")
        if not (math.isfinite(self.T) and self.T > self.a):
            raise ValueError(f"T must be finite and > a, got T={self.T!r}, a={self.a!r}")

    @property
    def log_a(self) -> float:
        return math.log(self.a)

    @property
    def log_T(self) -> float:
        return math.log(self.T)

    def with_sigma(self, sigma: float) -> FracParams:
        return FracParams(sigma, self.a, self.T)


@dataclass(frozen=True, eq=False)
class LogGridFunction:
    """Samples on ``t_k = a (T/a)**(k/(n-1))``, interpolated by a cubic spline in ``ln t``."""

    a: float
    T: float
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("values must be a 1-d array with at least 2 samples")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if not (self.a > 0.0 and self.T > self.a):
            raise ValueError(f"need 0 < a < T, got a={self.a}, T={self.T}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], a: float, T: float, n: int) -> LogGridFunction:
        t = cls.grid(a, T, n)
        return cls(a, T, np.asarray(func(t), dtype=float))

    @staticmethod
    def grid(a: float, T: float, n: int) -> np.ndarray:
        t = a * (T / a) ** (np.arange(n) / (n - 1))
        t[0], t[-1] = a, T
        return t

    @property
    def n(self) -> int:
        return self.values.size

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.grid(self.a, self.T, self.n)

    @cached_property
    def log_nodes(self) -> np.ndarray:
        u = np.linspace(math.log(self.a), math.log(self.T), self.n)
        return u

    @cached_property
    def spline(self) -> CubicSpline:
        if self.n < 4:
            return CubicSpline(self.log_nodes, self.values, bc_type="natural")
        return CubicSpline(self.log_nodes, self.values)

    def __call__(self, t):
        return self.spline(np.log(t))


# integrand tags


@dataclass(frozen=True)
class Constant:
    c: float = 1.0


@dataclass(frozen=True)
class LogPower:
    """``t -> (ln t/a)**beta`` with ``beta > -1``."""

    beta: float

    def __post_init__(self) -> None:
        if not self.beta > -1.0:
            raise ValueError(f"LogPower requires beta > -1, got {self.beta!r}")


@dataclass(frozen=True)
class MuFamily:
    """``t -> (ln T/a)**(-kappa) (ln T/t)**kappa`` with ``kappa >= 1``."""

    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa >= 1.0:
            raise ValueError(f"MuFamily requires kappa >= 1, got {self.kappa!r}")


@dataclass(frozen=True)
class Sampled:
    grid: LogGridFunction


@dataclass(frozen=True)
class LogProduct:
    """``coef (ln t/a)**beta_a (ln T/t)**beta_T``; closed forms reduce to sums of these."""

    coef: float
    beta_a: float = 0.0
    beta_T: float = 0.0


@dataclass(frozen=True)
class Function:
    """A vectorised callable ``func(t)`` times optional log-power endpoint factors.

    ``func`` must be smooth on ``[a, T]``; the factors carry the algebraic behaviour
    at the endpoints so that quadrature can absorb it.
    """

    func: Callable[[np.ndarray], np.ndarray]
    beta_a: float = 0.0
    beta_T: float = 0.0


Integrand = Union[Constant, LogPower, MuFamily, Sampled, LogProduct, Function]


@dataclass(frozen=True)
class Piece:
    coef: float
    beta_a: float = 0.0
    beta_T: float = 0.0
    smooth: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    knots: tuple[float, ...] = ()

    @property
    def closed_form(self) -> bool:
        return self.smooth is None


def pieces(f: Integrand, p: FracParams) -> list[Piece]:
    """Decompose an integrand into pieces on the interval of ``p``."""
    if isinstance(f, Constant):
        return [Piece(float(f.c))]
    if isinstance(f, LogPower):
        return [Piece(1.0, f.beta, 0.0)]
    if isinstance(f, MuFamily):
        return [Piece(math.log(p.T / p.a) ** (-f.kappa), 0.0, f.kappa)]
    if isinstance(f, LogProduct):
        return [Piece(float(f.coef), f.beta_a, f.beta_T)]
    if isinstance(f, Function):
        func = f.func
        return [Piece(1.0, f.beta_a, f.beta_T, smooth=lambda u: func(np.exp(u)))]
    if isinstance(f, Sampled):
        g = f.grid
        tol = 1e-12 * p.T
        if g.a > p.a * (1 + 1e-12) or g.T < p.T - tol:
            raise ValueError(f"sampled grid [{g.a}, {g.T}] does not cover [{p.a}, {p.T}]")
        u = g.log_nodes
        return [Piece(1.0, smooth=g.spline, knots=tuple(float(x) for x in u))]
    raise TypeError(f"unsupported integrand {f!r}")


def evaluate_integrand(f: Integrand | Callable, p: FracParams, t):
    """Pointwise value of an integrand at ``t`` (array or scalar)."""
    t = np.asarray(t, dtype=float)
    if callable(f) and not isinstance(f, (Constant, LogPower, MuFamily, Sampled, LogProduct, Function)):
        return f(t)
    u = np.log(t)
    out = np.zeros_like(t)
    for pc in pieces(f, p):
        val = pc.coef * np.ones_like(t)
        if pc.beta_a:
            val = val * (u - p.log_a) ** pc.beta_a
        if pc.beta_T:
            val = val * (p.log_T - u) ** pc.beta_T
        if pc.smooth is not None:
            val = val * pc.smooth(u)
        out = out + val
    return out


def _check_t(p: FracParams, t: float) -> float:
    t = float(t)
    if not (p.a * (1 - 1e-15) <= t <= p.T * (1 + 1e-15)):
        raise ValueError(f"t={t} lies outside [a, T] = [{p.a}, {p.T}]")
    return min(max(t, p.a), p.T)


def _result(res: QuadResult, with_error: bool):
    return res if with_error else res.value


def _combine(results: Sequence[QuadResult]) -> QuadResult:
    return QuadResult(sum(r.value for r in results), sum(r.error for r in results))


# Riemann-Liouville integrals, computed in the original variable s


def _log_ratio_from_left(a: float) -> Callable[[np.ndarray], np.ndarray]:
    # ln(s/a)/(s - a), positive and analytic near s = a
    def corr(s):
        d = s - a
        x = d / a
        small = np.abs(x) < 1e-8
        safe = np.where(small, 1.0, x)
        out = np.log1p(safe) / (safe * a)
        return np.where(small, (1.0 - x / 2.0 + x * x / 3.0) / a, out)

    return corr


def _log_ratio_from_right(T: float) -> Callable[[np.ndarray], np.ndarray]:
    # ln(T/s)/(T - s)
    def corr(s):
        y = (T - s) / s
        small = np.abs(y) < 1e-8
        safe = np.where(small, 1.0, y)
        out = np.log1p(safe) / (safe * s)
        return np.where(small, (1.0 - y / 2.0 + y * y / 3.0) / s, out)

    return corr


def _rl_pieces(f, p: FracParams) -> list[Piece]:
    if isinstance(f, (Constant, LogPower, MuFamily, Sampled, LogProduct, Function)):
        return pieces(f, p)
    if callable(f):
        return [Piece(1.0, smooth=lambda u: f(np.exp(u)))]
    raise TypeError(f"unsupported integrand {f!r}")


def _rl_piece(pc: Piece, p: FracParams, lo: float, hi: float, kernel: Factor, q: QuadratureSpec) -> QuadResult:
    factors = [kernel]
    if pc.beta_a:
        factors.append(Factor(p.a, pc.beta_a, 1, _log_ratio_from_left(p.a)))
    if pc.beta_T:
        factors.append(Factor(p.T, pc.beta_T, -1, _log_ratio_from_right(p.T)))
    smooth = None
    if pc.smooth is not None:
        sm = pc.smooth
        smooth = lambda s: sm(np.log(s))  # noqa: E731
    breaks = [math.exp(k) for k in pc.knots]
    return integrate_factored(
        lo, hi, factors, q, coef=pc.coef / gamma_fn(p.sigma), smooth=smooth, breakpoints=breaks
    )


def rl_left_integral(f, p: FracParams, t: float, q: QuadratureSpec | None = None, *, with_error: bool = False):
    """``(I_a^sigma f)(t) = 1/Gamma(sigma) int_a^t (t - s)**(sigma - 1) f(s) ds``.

    ``f`` is an integrand tag or a plain vectorised callable of ``s``.
    """
    q = _spec(q)
    t = _check_t(p, t)
    if t == p.a:
        return _result(QuadResult(0.0, 0.0), with_error)
    kernel = Factor(t, p.sigma - 1.0, -1)
    res = _combine([_rl_piece(pc, p, p.a, t, kernel, q) for pc in _rl_pieces(f, p)])
    return _result(res, with_error)


def rl_right_integral(f, p: FracParams, t: float, q: QuadratureSpec | None = None, *, with_error: bool = False):
    """``(I_T^sigma f)(t) = 1/Gamma(sigma) int_t^T (s - t)**(sigma - 1) f(s) ds``."""
    q = _spec(q)
    t = _check_t(p, t)
    if t == p.T:
        return _result(QuadResult(0.0, 0.0), with_error)
    kernel = Factor(t, p.sigma - 1.0, 1)
    res = _combine([_rl_piece(pc, p, t, p.T, kernel, q) for pc in _rl_pieces(f, p)])
    return _result(res, with_error)


def rl_left_on_interval(
    g: Callable[[np.ndarray], np.ndarray] | None,
    lo: float,
    x: float,
    sigma: float,
    q: QuadratureSpec | None = None,
    *,
    factors: Sequence[Factor] = (),
    coef: float = 1.0,
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """Left Riemann-Liouville integral of ``coef * prod(factors) * g`` on an arbitrary real interval."""
    q = _spec(q)
    if x == lo:
        return QuadResult(0.0, 0.0)
    kernel = Factor(x, sigma - 1.0, -1)
    return integrate_factored(
        lo, x, [kernel, *factors], q, coef=coef / gamma_fn(sigma), smooth=g, breakpoints=breakpoints
    )


# Hadamard integrals, computed through the normalised log substitution


def _hadamard_left_piece(pc: Piece, p: FracParams, t: float, q: QuadratureSpec) -> QuadResult:
    # tau = ln(t/s) / ln(t/a) maps [a, t] onto [0, 1]
    lt = math.log(t)
    X = lt - p.log_a
    Y = p.log_T - lt
    sigma = p.sigma
    factors = [Factor(0.0, sigma - 1.0, 1)]
    coef = pc.coef * X**sigma / gamma_fn(sigma)
    if pc.beta_a:
        factors.append(Factor(1.0, pc.beta_a, -1))
        coef *= X**pc.beta_a
    if pc.beta_T:
        factors.append(Factor(-Y / X, pc.beta_T, 1))
        coef *= X**pc.beta_T
    smooth = None
    if pc.smooth is not None:
        sm = pc.smooth
        smooth = lambda tau: sm(lt - tau * X)  # noqa: E731
    breaks = [(lt - k) / X for k in pc.knots]
    return integrate_factored(0.0, 1.0, factors, q, coef=coef, smooth=smooth, breakpoints=breaks)


def _hadamard_right_piece(pc: Piece, p: FracParams, t: float, q: QuadratureSpec) -> QuadResult:
    # tau = ln(s/t) / ln(T/t) maps [t, T] onto [0, 1]
    lt = math.log(t)
    X = lt - p.log_a
    Y = p.log_T - lt
    sigma = p.sigma
    factors = [Factor(0.0, sigma - 1.0, 1)]
    coef = pc.coef * Y**sigma / gamma_fn(sigma)
    if pc.beta_a:
        factors.append(Factor(-X / Y, pc.beta_a, 1))
        coef *= Y**pc.beta_a
    if pc.beta_T:
        factors.append(Factor(1.0, pc.beta_T, -1))
        coef *= Y**pc.beta_T
    smooth = None
    if pc.smooth is not None:
        sm = pc.smooth
        smooth = lambda tau: sm(lt + tau * Y)  # noqa: E731
    breaks = [(k - lt) / Y for k in pc.knots]
    return integrate_factored(0.0, 1.0, factors, q, coef=coef, smooth=smooth, breakpoints=breaks)


def hadamard_left_integral(f: Integrand, p: FracParams, t: float, q: QuadratureSpec | None = None, *, with_error: bool = False):
    """``(J_a^sigma f)(t) = 1/Gamma(sigma) int_a^t (ln t/s)**(sigma-1) f(s) ds/s``.

    Returns 0 at ``t = a``.
    """
    q = _spec(q)
    t = _check_t(p, t)
    if t == p.a:
        return _result(QuadResult(0.0, 0.0), with_error)
    res = _combine([_hadamard_left_piece(pc, p, t, q) for pc in pieces(f, p)])
    return _result(res, with_error)


def hadamard_right_integral(f: Integrand, p: FracParams, t: float, q: QuadratureSpec | None = None, *, with_error: bool = False):
    """``(J_T^sigma f)(t) = 1/Gamma(sigma) int_t^T (ln s/t)**(sigma-1) f(s) ds/s``.

    Returns 0 at ``t = T``.
    """
    q = _spec(q)
    t = _check_t(p, t)
    if t == p.T:
        return _result(QuadResult(0.0, 0.0), with_error)
    res = _combine([_hadamard_right_piece(pc, p, t, q) for pc in pieces(f, p)])
    return _result(res, with_error)


# Hadamard-Caputo derivative


def _log_derivative_pieces(f: Integrand, p: FracParams) -> list[Piece]:
    """Pieces of ``t f'(t) = d f / d(ln t)``."""
    if isinstance(f, Sampled):
        g = f.grid
        du = g.log_nodes[1] - g.log_nodes[0]
        deriv = np.gradient(g.values, du, edge_order=2) if g.n >= 3 else np.gradient(g.values, du)
        return pieces(Sampled(LogGridFunction(g.a, g.T, deriv)), p)
    if isinstance(f, Function):
        raise TypeError("Function integrands carry no derivative; use a closed form or Sampled")
    out: list[Piece] = []
    for pc in pieces(f, p):
        A, B = pc.beta_a, pc.beta_T
        if -1.0 < A < 0.0:
            raise ValueError(f"(ln t/a)**{A} is not absolutely continuous on [a, T]")
        if A != 0.0:
            out.append(Piece(pc.coef * A, A - 1.0, B))
        if B != 0.0:
            if B < 0.0:
                raise ValueError(f"(ln T/t)**{B} is not absolutely continuous on [a, T]")
            out.append(Piece(-pc.coef * B, A, B - 1.0))
    return out


def hadamard_caputo_derivative(
    f: Integrand,
    alpha: float,
    p: FracParams,
    t: float,
    q: QuadratureSpec | None = None,
    *,
    with_error: bool = False,
):
    """``(D_a^alpha f)(t) = J_a^(1-alpha) (t f')(t)`` for ``alpha`` in (0, 1).

    ``p.sigma`` is ignored; only the interval of ``p`` is used. For ``Sampled``
    input the log-derivative comes from second-order differences on the grid.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    q = _spec(q)
    pp = p.with_sigma(1.0 - alpha)
    t = _check_t(pp, t)
    if t == pp.a:
        return _result(QuadResult(0.0, 0.0), with_error)
    parts = _log_derivative_pieces(f, pp)
    res = _combine([_hadamard_left_piece(pc, pp, t, q) for pc in parts])
    return _result(res, with_error)


# identity checks


def conjugate_check(f: Integrand, p: FracParams, t: float, q: QuadratureSpec | None = None) -> tuple[float, float]:
    """Both sides of ``(J_a^sigma f)(t) = (I_{ln a}^sigma f o exp)(ln t)``.

    The left side uses the normalised Hadamard substitution; the right side runs
    the Riemann-Liouville engine directly in the variable ``u = ln s``.
    """
    q = _spec(q)
    t = _check_t(p, t)
    lhs = hadamard_left_integral(f, p, t, q)
    x = math.log(t)
    lo = p.log_a
    rhs = 0.0
    for pc in pieces(f, p):
        factors = []
        if pc.beta_a:
            factors.append(Factor(lo, pc.beta_a, 1))
        if pc.beta_T:
            factors.append(Factor(p.log_T, pc.beta_T, -1))
        rhs += rl_left_on_interval(
            pc.smooth, lo, x, p.sigma, q, factors=factors, coef=pc.coef, breakpoints=pc.knots
        ).value
    return lhs, rhs


def _outer_breaks(fp: Piece, gp: Piece) -> list[float]:
    return sorted(set(fp.knots) | set(gp.knots))


def _ibp_side(
    fp: Piece,
    gp: Piece,
    p: FracParams,
    q: QuadratureSpec,
    *,
    left: bool,
) -> float:
    """One side of the Hadamard integration-by-parts identity for a pair of pieces.

    ``left=True`` gives int (J_a f) g dt/t, else int f (J_T g) dt/t, both over [a, T]
    in the variable u = ln t.
    """
    la, lT = p.log_a, p.log_T
    sigma = p.sigma
    inner_pc = fp if left else gp
    outer_pc = gp if left else fp
    inner_op = _hadamard_left_piece if left else _hadamard_right_piece

    # endpoint exponents of the inner image: J_a keeps (ln t/a)**(sigma + beta_a),
    # J_T keeps (ln T/t)**(sigma + beta_T)
    if left:
        lo_pow_inner = sigma + inner_pc.beta_a
        hi_pow_inner = 0.0
    else:
        lo_pow_inner = 0.0
        hi_pow_inner = sigma + inner_pc.beta_T
    inner_piece = Piece(inner_pc.coef, inner_pc.beta_a, inner_pc.beta_T, inner_pc.smooth, inner_pc.knots)

    def smooth(u: np.ndarray) -> np.ndarray:
        flat = np.ravel(u)
        vals = np.empty_like(flat)
        for i, ui in enumerate(flat):
            t = math.exp(ui)
            img = inner_op(inner_piece, p, t, q).value
            X = ui - la
            Y = lT - ui
            if lo_pow_inner:
                img /= X**lo_pow_inner
            if hi_pow_inner:
                img /= Y**hi_pow_inner
            vals[i] = img
        vals = vals.reshape(np.shape(u))
        if outer_pc.smooth is not None:
            vals = vals * outer_pc.smooth(u)
        return vals

    factors = []
    lo_pow = lo_pow_inner + outer_pc.beta_a
    hi_pow = hi_pow_inner + outer_pc.beta_T
    if lo_pow:
        factors.append(Factor(la, lo_pow, 1))
    if hi_pow:
        factors.append(Factor(lT, hi_pow, -1))
    # the outer integrand carries the inner quadrature noise, so its target cannot be tighter;
    # each outer node costs a full inner quadrature, hence the smaller starting rule
    outer = replace(q, rel_tol=max(q.rel_tol, 1e-10), points=max(4, q.points // 2))
    res = integrate_factored(
        la,
        lT,
        factors,
        outer,
        coef=outer_pc.coef,
        smooth=smooth,
        breakpoints=_outer_breaks(fp, gp),
        end_grading=6,
    )
    return res.value


def integration_by_parts_residual(
    f: Integrand,
    g: Integrand,
    p: FracParams,
    q: QuadratureSpec | None = None,
    *,
    return_sides: bool = False,
):
    """``int (J_a^sigma f) g dt/t - int f (J_T^sigma g) dt/t`` over ``[a, T]``.

    With ``return_sides=True`` the pair ``(lhs, rhs)`` is returned instead.
    """
    q = _spec(q)
    lhs = rhs = 0.0
    for fp in pieces(f, p):
        for gp in pieces(g, p):
            lhs += _ibp_side(fp, gp, p, q, left=True)
            rhs += _ibp_side(fp, gp, p, q, left=False)
    if return_sides:
        return lhs, rhs
    return lhs - rhs
