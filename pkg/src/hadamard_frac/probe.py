"""Numerical probe of the test-function estimates behind the nonexistence results.

All time integrals are taken in ``x = ln(t/a)`` on ``[0, L]`` with ``L = ln(T/a)``.
In that variable ``eta(t) dt = mu dx`` and ``t * d/dt`` is ``d/dx``, so the
horizons ``T = exp(R**theta)`` used in the sweeps never have to be formed.

The right side of the master inequality is made fully explicit: combining the
two Young steps with ``eps1 = |lambda|/2`` and ``eps2 = |lambda|/4`` cancels the
nonlinear term exactly and leaves

    phi_factor * lhs <= |lambda| (C(eps1) K2 + 2 C(eps2) K1),

with ``C(eps) = ((p-1)/p) (eps p)**(-1/(p-1))``. For a solution to exist this
must hold for every ``R``; rows where it fails are flagged ``contradiction``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import roots_legendre

from .criterion import ProblemParams, SignFunctionals, duality_coefficients, evaluate
from .initial_data import RadialProfile, cutoff_weighted_integral, sphere_area
from .quadrature import Factor, QuadratureSpec, integrate_factored
from .special import beta_fn, gamma_ratio
from .testfunctions import (
    CutoffParams,
    MuParams,
    TestFunction,
    _mu_image_tderiv_log,
    _mu_log,
    cutoff_constants,
    cutoff_eval,
    k22_density,
    laplacian_of_power,
    phi_weighted_image_at_a,
)

__all__ = [
    "GridMismatchError",
    "ProbeConfig",
    "ProbeRow",
    "RegimeError",
    "SampledComplexField",
    "SweepResult",
    "decay_exponent",
    "k1_terms",
    "k2_terms",
    "master_inequality",
    "r_exponents",
    "rows_to_csv",
    "sweep",
    "sweep_summary",
    "weak_residuals",
    "young_constant",
]


class RegimeError(ValueError):
    """Parameters outside the range where the estimates are defined."""


class GridMismatchError(ValueError):
    """A sampled field does not live on the grid implied by the configuration."""


def young_constant(eps: float, p: float) -> float:
    """Smallest ``C`` with ``x y <= eps x**p + C y**(p/(p-1))`` for all ``x, y >= 0``."""
    if not (eps > 0.0 and p > 1.0):
        raise ValueError(f"need eps > 0 and p > 1, got eps={eps}, p={p}")
    return (p - 1.0) / p * (eps * p) ** (-1.0 / (p - 1.0))


def decay_exponent(alpha: float, gamma: float, N: int, p: float) -> float:
    """Power of ``R`` left on the right side once ``theta = 2/alpha``."""
    return (N * alpha * (p - 1.0) - 2.0 * (alpha + gamma)) / (alpha * (p - 1.0))


def r_exponents(alpha: float, gamma: float, N: int, p: float, theta: float) -> tuple[float, float]:
    """Powers of ``R`` in the K1 and K2 contributions after ``T = exp(R**theta)``."""
    e1 = N + theta * (alpha - (gamma + alpha * p) / (p - 1.0))
    e2 = N - 2.0 * p / (p - 1.0) + theta * (alpha - gamma / (p - 1.0))
    return e1, e2


@dataclass(frozen=True)
class ProbeConfig:
    pp: ProblemParams
    tf: TestFunction
    R_grid: tuple[float, ...] = (10.0, 20.0, 40.0, 80.0)
    theta: float | None = None
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self) -> None:
        pp, tf = self.pp, self.tf
        object.__setattr__(self, "R_grid", tuple(float(r) for r in self.R_grid))
        if self.theta is None:
            object.__setattr__(self, "theta", 2.0 / pp.alpha)
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise ValueError(f"theta must be > 0, got {self.theta!r}")
        if any(r <= 0.0 for r in self.R_grid) or any(b <= a for a, b in zip(self.R_grid, self.R_grid[1:])):
            raise ValueError("R_grid must be positive and strictly increasing")
        if tf.cutoff.N != pp.N:
            raise ValueError(f"dimension mismatch: problem N={pp.N}, cutoff N={tf.cutoff.N}")
        if tf.mu.a != pp.a:
            raise ValueError(f"initial time mismatch: problem a={pp.a}, weight a={tf.mu.a}")
        q = self.q
        if not tf.mu.kappa > pp.alpha * q:
            raise RegimeError(f"kappa={tf.mu.kappa} must exceed alpha p/(p-1) = {pp.alpha * q:.17g}")
        if not tf.cutoff.ell > 2.0 * q:
            raise RegimeError(f"ell={tf.cutoff.ell} must exceed 2p/(p-1) = {2.0 * q:.17g}")
        if not pp.gamma < pp.p - 1.0:
            raise RegimeError(f"gamma={pp.gamma} must be < p-1 = {pp.p - 1.0:.17g}")

    @property
    def q(self) -> float:
        return self.pp.p / (self.pp.p - 1.0)

    def at_radius(self, R: float) -> TestFunction:
        """Test function with cutoff radius ``R`` and horizon ``ln(T/a) = R**theta``."""
        mu = MuParams(self.pp.a, R**self.theta, self.tf.mu.kappa)
        return TestFunction(mu, CutoffParams(R, self.tf.cutoff.ell, self.pp.N))


class KTerms(NamedTuple):
    quad: float
    exact: float
    bound: float
    spatial: float
    spatial_bound: float
    product: float


def _time_integral(m: MuParams, A: float, B: float, density, q: QuadratureSpec) -> float:
    """``int_0^L x**A y**B s(x) dx`` with ``y = L - x``; ``density(x)`` is the full integrand.

    The algebraic factors are absorbed into the Jacobi weight and the integrand
    is divided by them pointwise, so whatever ``density`` computes is what gets
    integrated.
    """
    L = m.log_ratio

    def smooth(tau):
        x = L * tau
        y = L - x
        return density(x) / (x**A * y**B)

    factors = [Factor(0.0, A, 1), Factor(1.0, B, -1)]
    res = integrate_factored(0.0, 1.0, factors, q, coef=L ** (1.0 + A + B), smooth=smooth)
    return res.value


_radial_cache: dict[tuple, float] = {}


def _unit_radial(kind: str, N: int, ell: int, p: float) -> float:
    """``int rho**(N-1) w(rho) d rho`` for the unit-radius cutoff; R enters only by scaling."""
    key = (kind, N, ell, p)
    if key not in _radial_cache:
        c = CutoffParams(1.0, ell, N)
        x, w = roots_legendre(48)
        if kind == "K12":
            edges = np.linspace(1.0, 2.0, 17)
            func = lambda r: cutoff_eval(c, r) ** ell * r ** (N - 1)  # noqa: E731
            base = 1.0 / N
        else:
            edges = np.linspace(1.0, 2.0, 33)
            func = lambda r: k22_density(c, p, r) * r ** (N - 1)  # noqa: E731
            base = 0.0
        lo, hi = edges[:-1, None], edges[1:, None]
        nodes = lo + (hi - lo) * (x + 1.0) / 2.0
        _radial_cache[key] = base + float(np.sum(func(nodes) * w * (hi - lo) / 2.0))
    return _radial_cache[key]


def k1_terms(cfg: ProbeConfig, tf: TestFunction | None = None) -> KTerms:
    """``K11`` by quadrature, in closed form and its bound; ``K12 = int xi**ell``; ``K1``."""
    tf = cfg.tf if tf is None else tf
    pp, m, c = cfg.pp, tf.mu, tf.cutoff
    q = cfg.q
    alpha, gamma = pp.alpha, pp.gamma
    sigma = 1.0 - alpha
    L = m.log_ratio
    A = -gamma / (pp.p - 1.0)
    B = m.kappa - alpha * q

    def density(x):
        mu = _mu_log(m, x)
        tj = np.abs(_mu_image_tderiv_log(m, sigma, x))
        with np.errstate(divide="ignore", invalid="ignore"):
            return x**A * mu ** (-1.0 / (pp.p - 1.0)) * tj**q

    k11 = _time_integral(m, A, B, density, cfg.quad)
    G = gamma_ratio(m.kappa + 1.0, m.kappa + 1.0 - alpha)
    k11_exact = G**q * L ** (1.0 + A - alpha * q) * beta_fn(1.0 + A, B + 1.0)
    k11_bound = G**q / (1.0 + A) * L ** (1.0 - (gamma + alpha * pp.p) / (pp.p - 1.0))

    omega = sphere_area(pp.N)
    k12 = omega * c.R**pp.N * _unit_radial("K12", pp.N, c.ell, pp.p)
    k12_bound = omega / pp.N * (2.0 * c.R) ** pp.N
    return KTerms(k11, k11_exact, k11_bound, k12, k12_bound, k11 * k12)


def k2_terms(cfg: ProbeConfig, tf: TestFunction | None = None) -> KTerms:
    """``K21`` by quadrature, in closed form and its bound; ``K22`` and its measured-constant bound; ``K2``."""
    tf = cfg.tf if tf is None else tf
    pp, m, c = cfg.pp, tf.mu, tf.cutoff
    q = cfg.q
    L = m.log_ratio
    A = -pp.gamma / (pp.p - 1.0)

    def density(x):
        return x**A * _mu_log(m, x)

    k21 = _time_integral(m, A, m.kappa, density, cfg.quad)
    k21_exact = L ** (1.0 + A) * beta_fn(1.0 + A, m.kappa + 1.0)
    k21_bound = L ** (1.0 + A) / (1.0 + A)

    omega = sphere_area(pp.N)
    k22 = omega * c.R ** (pp.N - 2.0 * q) * _unit_radial("K22", pp.N, c.ell, pp.p)
    cg, cl = _measured_constants(pp.N)
    ann = omega / pp.N * (2.0**pp.N - 1.0)
    k22_bound = (c.ell * ((c.ell - 1) * cg**2 + cl)) ** q * ann * c.R ** (pp.N - 2.0 * q)
    return KTerms(k21, k21_exact, k21_bound, k22, k22_bound, k21 * k22)


_const_cache: dict[int, tuple[float, float]] = {}


def _measured_constants(N: int) -> tuple[float, float]:
    if N not in _const_cache:
        _const_cache[N] = cutoff_constants(N, 1.0, n=200_000)
    return _const_cache[N]


@dataclass
class ProbeRow:
    R: float
    T: float
    log_T: float
    K11_quad: float
    K11_exact: float
    K11_bound: float
    K12: float
    K12_bound: float
    K21_quad: float
    K21_exact: float
    K21_bound: float
    K22: float
    K22_bound: float
    K1: float
    K2: float
    lhs: float
    rhs_bound: float
    term1: float
    term2: float
    exponent_K1: float
    exponent_K2: float
    decay_exponent: float
    bounds_hold: bool
    contradiction: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["T"]):
            d["T"] = None
        return d


def _branch(pp: ProblemParams, sf: SignFunctionals) -> tuple[float, tuple[float, float]]:
    """Multiplier and ``(f1, f2)`` coefficients of the positive sign functional."""
    r, s = duality_coefficients(pp.alpha)
    if sf.I1 > 0.0:
        return pp.lambda1, (r, -s)
    if sf.I2 > 0.0:
        return pp.lambda2, (s, r)
    raise RegimeError("neither sign functional is positive; the estimate chain does not apply")


def _combined_cutoff_integral(profiles: Sequence[RadialProfile], coeffs: tuple[float, float], c: CutoffParams) -> float:
    total = 0.0
    for rp in profiles:
        w = coeffs[0] if rp.part == "real" else coeffs[1]
        if w != 0.0:
            total += w * cutoff_weighted_integral(rp, c)
    return total


def master_inequality(
    cfg: ProbeConfig,
    sf: SignFunctionals,
    profiles: Sequence[RadialProfile],
    R: float | None = None,
) -> ProbeRow:
    """Both sides of the master inequality at one radius, with ``ln(T/a) = R**theta``."""
    pp = cfg.pp
    lam, coeffs = _branch(pp, sf)
    R = cfg.tf.cutoff.R if R is None else float(R)
    tf = cfg.at_radius(R)
    k1 = k1_terms(cfg, tf)
    k2 = k2_terms(cfg, tf)
    phi = phi_weighted_image_at_a(tf, pp.alpha)
    p = pp.p
    term1 = 2.0 * abs(lam) * young_constant(abs(lam) / 4.0, p) * k1.product / phi
    term2 = abs(lam) * young_constant(abs(lam) / 2.0, p) * k2.product / phi
    lhs = lam * _combined_cutoff_integral(profiles, coeffs, tf.cutoff)
    rhs = term1 + term2
    e1, e2 = r_exponents(pp.alpha, pp.gamma, pp.N, p, cfg.theta)
    tol = 1e-10
    bounds_hold = (
        k1.quad <= k1.bound * (1 + tol)
        and k2.quad <= k2.bound * (1 + tol)
        and k1.spatial <= k1.spatial_bound * (1 + tol)
        and k2.spatial <= k2.spatial_bound * (1 + tol)
    )
    log_T = math.log(pp.a) + tf.mu.log_ratio
    return ProbeRow(
        R=R,
        T=math.exp(log_T) if log_T < 709.0 else math.inf,
        log_T=log_T,
        K11_quad=k1.quad,
        K11_exact=k1.exact,
        K11_bound=k1.bound,
        K12=k1.spatial,
        K12_bound=k1.spatial_bound,
        K21_quad=k2.quad,
        K21_exact=k2.exact,
        K21_bound=k2.bound,
        K22=k2.spatial,
        K22_bound=k2.spatial_bound,
        K1=k1.product,
        K2=k2.product,
        lhs=lhs,
        rhs_bound=rhs,
        term1=term1,
        term2=term2,
        exponent_K1=e1,
        exponent_K2=e2,
        decay_exponent=decay_exponent(pp.alpha, pp.gamma, pp.N, p),
        bounds_hold=bounds_hold,
        contradiction=lhs > rhs,
    )


class SweepResult(NamedTuple):
    rows: list[ProbeRow]
    slope: float | None


def sweep(cfg: ProbeConfig, sf: SignFunctionals, profiles: Sequence[RadialProfile]) -> SweepResult:
    """One row per radius and the least-squares slope of ``ln rhs_bound`` against ``ln R``."""
    if not cfg.R_grid:
        raise ValueError("R_grid is empty")
    rows = [master_inequality(cfg, sf, profiles, R) for R in cfg.R_grid]
    slope = None
    if len(rows) >= 2:
        x = np.log([r.R for r in rows])
        y = np.log([r.rhs_bound for r in rows])
        slope = float(np.polyfit(x, y, 1)[0])
    return SweepResult(rows, slope)


def sweep_summary(cfg: ProbeConfig, sf: SignFunctionals, result: SweepResult) -> dict:
    pp = cfg.pp
    dexp = decay_exponent(pp.alpha, pp.gamma, pp.N, pp.p)
    e1, e2 = r_exponents(pp.alpha, pp.gamma, pp.N, pp.p, cfg.theta)
    report = evaluate(pp, sf)
    return {
        "alpha": pp.alpha,
        "gamma": pp.gamma,
        "N": pp.N,
        "p": pp.p,
        "theta": cfg.theta,
        "kappa": cfg.tf.mu.kappa,
        "ell": cfg.tf.cutoff.ell,
        "R_grid": list(cfg.R_grid),
        "slope": result.slope,
        "decay_exponent": dexp,
        "exponent_K1": e1,
        "exponent_K2": e2,
        "exponents_equalized": e1 == e2 or abs(e1 - e2) <= 1e-12 * max(1.0, abs(e1)),
        # with theta != 2/alpha the slower of the two terms decides
        "regime": "contradiction" if max(e1, e2) < 0.0 else "no contradiction regime",
        "contradiction_rows": [r.R for r in result.rows if r.contradiction],
        "bounds_hold": all(r.bounds_hold for r in result.rows),
        "verdict": report.verdict,
    }


def rows_to_csv(rows: Sequence[ProbeRow]) -> str:
    names = [f.name for f in fields(ProbeRow)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        d = r.to_dict()
        w.writerow(["" if d[n] is None else (format(d[n], ".17g") if isinstance(d[n], float) else d[n]) for n in names])
    return buf.getvalue()


# weak formulation residuals


@dataclass(frozen=True, eq=False)
class SampledComplexField:
    """``u = u1 + i u2`` on nodes ``x_i = i L/(n_t-1)`` (``x = ln t/a``) times ``r_j = 2R j/(n_r-1)``.

    Both node counts must be odd so that one Richardson step can use every
    other node.
    """

    log_ratio: float
    R: float
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self) -> None:
        u1 = np.asarray(self.u1, dtype=float)
        u2 = np.asarray(self.u2, dtype=float)
        if u1.ndim != 2 or u1.shape != u2.shape:
            raise GridMismatchError("u1 and u2 must be 2-d arrays of the same shape")
        nt, nr = u1.shape
        if nt < 5 or nr < 5 or nt % 2 == 0 or nr % 2 == 0:
            raise GridMismatchError(f"node counts must be odd and >= 5, got {u1.shape}")
        if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
            raise ValueError("sampled field must be finite")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    @classmethod
    def from_function(cls, tf: TestFunction, n_t: int, n_r: int, func) -> SampledComplexField:
        """Sample ``func(x, r) -> complex`` on the grid matching ``tf``."""
        x, r = _nodes(tf.mu.log_ratio, tf.cutoff.R, n_t, n_r)
        vals = np.asarray(func(x[:, None], r[None, :]), dtype=complex) * np.ones((n_t, n_r))
        return cls(tf.mu.log_ratio, tf.cutoff.R, vals.real, vals.imag)

    @classmethod
    def zeros(cls, tf: TestFunction, n_t: int = 65, n_r: int = 129) -> SampledComplexField:
        z = np.zeros((n_t, n_r))
        return cls(tf.mu.log_ratio, tf.cutoff.R, z, z)


def _nodes(L: float, R: float, n_t: int, n_r: int) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(0.0, L, n_t), np.linspace(0.0, 2.0 * R, n_r)


def _trap_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2.0
    return w


def _power_weights(x: np.ndarray, g: float) -> np.ndarray:
    """Weights of ``int x**g v(x) dx`` for ``v`` piecewise linear on uniform ``x`` with ``x[0] = 0``."""
    if g == 0.0:
        return _trap_weights(x.size, x[1] - x[0])
    h = x[1] - x[0]
    F0 = x ** (g + 1.0) / (g + 1.0)
    F1 = x ** (g + 2.0) / (g + 2.0)
    m0 = np.diff(F0)  # int x**g over each cell
    m1 = np.diff(F1)  # int x**(g+1) over each cell
    x0 = x[:-1]
    x1 = x[1:]
    right = (m1 - x0 * m0) / h  # hat rising toward x1
    left = (x1 * m0 - m1) / h  # hat falling from x0
    w = np.zeros_like(x)
    w[:-1] += left
    w[1:] += right
    return w


def _richardson(F: np.ndarray, x: np.ndarray, r: np.ndarray, g: float, N: int) -> float:
    rw = r ** (N - 1)

    def level(step: int) -> float:
        xs, rs = x[::step], r[::step]
        wx = _power_weights(xs, g)
        wr = _trap_weights(rs.size, rs[1] - rs[0]) * rw[::step]
        return float(wx @ F[::step, ::step] @ wr)

    fine, coarse = level(1), level(2)
    return (4.0 * fine - coarse) / 3.0


def _richardson_radial(v: np.ndarray, r: np.ndarray) -> float:
    fine = float(_trap_weights(r.size, r[1] - r[0]) @ v)
    coarse = float(_trap_weights(r[::2].size, r[2] - r[0]) @ v[::2])
    return (4.0 * fine - coarse) / 3.0


class WeakResiduals(NamedTuple):
    res1: float
    res2: float
    terms1: dict
    terms2: dict


def weak_residuals(
    u: SampledComplexField,
    cfg: ProbeConfig,
    profiles: Sequence[RadialProfile] = (),
) -> WeakResiduals:
    """Left minus right side of both weak-formulation identities for the test function of ``cfg``.

    ``profiles`` supply ``f = f1 + i f2``; an empty sequence means ``f = 0``.
    """
    pp, tf = cfg.pp, cfg.tf
    m, c = tf.mu, tf.cutoff
    if abs(u.log_ratio - m.log_ratio) > 1e-12 * m.log_ratio or abs(u.R - c.R) > 1e-12 * c.R:
        raise GridMismatchError(
            f"field grid (ln(T/a)={u.log_ratio}, R={u.R}) does not match the test function "
            f"(ln(T/a)={m.log_ratio}, R={c.R})"
        )
    for rp in profiles:
        if rp.N != pp.N:
            raise ValueError(f"profile dimension {rp.N} does not match N={pp.N}")
    n_t, n_r = u.u1.shape
    x, r = _nodes(m.log_ratio, c.R, n_t, n_r)
    N = pp.N
    omega = sphere_area(N)
    ra, sa = duality_coefficients(pp.alpha)

    mu = _mu_log(m, x)[:, None]
    tj = _mu_image_tderiv_log(m, 1.0 - pp.alpha, x)[:, None]
    xil = (cutoff_eval(c, r) ** c.ell)[None, :]
    lap = np.asarray(laplacian_of_power(c, r))[None, :]

    u1, u2 = u.u1, u.u2
    absu_p = np.hypot(u1, u2) ** pp.p
    nonlin = omega * _richardson(absu_p * mu * xil, x, r, pp.gamma, N)
    diff1 = omega * _richardson(u1 * mu * lap, x, r, 0.0, N)
    diff2 = omega * _richardson(u2 * mu * lap, x, r, 0.0, N)
    drift1 = omega * _richardson((ra * u1 - sa * u2) * tj * xil, x, r, 0.0, N)
    drift2 = omega * _richardson((sa * u1 + ra * u2) * tj * xil, x, r, 0.0, N)

    phi = phi_weighted_image_at_a(tf, pp.alpha)
    f1 = np.zeros_like(r)
    f2 = np.zeros_like(r)
    for rp in profiles:
        target = f1 if rp.part == "real" else f2
        target += rp.radial_density(r)
    xi_row = xil[0]

    def initial(comb: np.ndarray) -> float:
        return omega * phi * _richardson_radial(comb * xi_row, r)

    init1 = initial(ra * f1 - sa * f2)
    init2 = initial(sa * f1 + ra * f2)

    t1 = {"nonlinear": pp.lambda1 * nonlin, "initial": init1, "diffusion": diff1, "drift": drift1}
    t2 = {"nonlinear": pp.lambda2 * nonlin, "initial": init2, "diffusion": diff2, "drift": drift2}
    res1 = t1["nonlinear"] + t1["initial"] - t1["diffusion"] + t1["drift"]
    res2 = t2["nonlinear"] + t2["initial"] - t2["diffusion"] + t2["drift"]
    return WeakResiduals(res1, res2, t1, t2)


def summary_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=2)
