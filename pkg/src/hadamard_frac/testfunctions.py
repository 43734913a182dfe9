"""Time weight ``mu``, radial cutoffs ``xi_R`` and the test function ``phi = eta * xi_R**ell``.

The cutoff profile is the partition-of-unity construction

    psi(r) = h(2 - r) / (h(2 - r) + h(r - 1)),   h(s) = exp(-1/s) for s > 0,

so that ``psi = 1`` on ``[0, 1]``, ``psi = 0`` on ``[2, inf)`` and ``psi`` is C-infinity.
Written as a logistic function of ``E(r) = 1/(2 - r) - 1/(r - 1)`` it never
forms the tiny exponentials directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .special import gamma_ratio

__all__ = [
    "CutoffParams",
    "MuParams",
    "TestFunction",
    "cutoff_eval",
    "cutoff_grad_norm",
    "cutoff_constants",
    "cutoff_laplacian",
    "default_exponents",
    "k22_density",
    "laplacian_of_power",
    "mu_eval",
    "mu_right_image",
    "mu_right_image_tderiv",
    "phi_weighted_image_at_a",
    "psi",
    "psi_derivatives",
]

# half-width of the band around r = 1 and r = 2 where psi is pinned to 1 or 0
SEAM_GUARD = 1e-12


@dataclass(frozen=True)
class MuParams:
    """``mu(t) = (ln T/a)**(-kappa) (ln T/t)**kappa`` on ``[a, T]``.

    The interval is stored through ``log_ratio = ln(T/a)`` so that the very long
    horizons used in scaling sweeps (``T = exp(R**theta)``) stay representable.
    """

    a: float
    log_ratio: float
    kappa: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"a must be > 0, got {self.a!r}")
        if not (math.isfinite(self.log_ratio) and self.log_ratio > 0.0):
            raise ValueError(f"ln(T/a) must be finite and > 0, got {self.log_ratio!r}")
        if not self.kappa >= 1.0:
            raise ValueError(f"kappa must be >= 1, got {self.kappa!r}")

    @classmethod
    def from_T(cls, a: float, T: float, kappa: float) -> MuParams:
        if not T > a:
            raise ValueError(f"need T > a, got a={a}, T={T}")
        return cls(a, math.log(T / a), kappa)

    @property
    def T(self) -> float:
        """``T`` itself; ``inf`` when it does not fit in a double."""
        try:
            return self.a * math.exp(self.log_ratio)
        except OverflowError:
            return math.inf

    def log_position(self, t: float) -> float:
        """``ln(t/a)`` for ``t`` in ``[a, T]``."""
        t = float(t)
        x = math.log(t / self.a)
        if x < -1e-15 * max(1.0, self.log_ratio) or x > self.log_ratio * (1 + 1e-15):
            raise ValueError(f"t={t} lies outside [a, T] = [{self.a}, {self.T}]")
        return min(max(x, 0.0), self.log_ratio)


@dataclass(frozen=True)
class CutoffParams:
    R: float
    ell: int
    N: int

    def __post_init__(self) -> None:
        if not self.R > 0.0:
            raise ValueError(f"R must be > 0, got {self.R!r}")
        if int(self.ell) != self.ell or self.ell < 2:
            raise ValueError(f"ell must be an integer >= 2, got {self.ell!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N!r}")


@dataclass(frozen=True)
class TestFunction:
    """``phi(t, x) = eta(t) xi_R(x)**ell`` with ``eta = mu / t``."""

    __test__ = False  # not a pytest class

    mu: MuParams
    cutoff: CutoffParams


def default_exponents(alpha: float, p: float) -> tuple[int, int]:
    """``(kappa, ell)`` large enough for every exponent in the K1/K2 estimates."""
    q = p / (p - 1.0)
    kappa = math.ceil(alpha * q) + 2
    ell = math.ceil(2.0 * q) + 2
    return kappa, ell


# time weight


def _mu_log(m: MuParams, x: float) -> float:
    return ((m.log_ratio - x) / m.log_ratio) ** m.kappa


def _mu_image_log(m: MuParams, sigma: float, x: float) -> float:
    L = m.log_ratio
    y = L - x
    return gamma_ratio(m.kappa + 1.0, sigma + m.kappa + 1.0) * L ** (-m.kappa) * y ** (sigma + m.kappa)


def _mu_image_tderiv_log(m: MuParams, sigma: float, x: float) -> float:
    L = m.log_ratio
    y = L - x
    return -gamma_ratio(m.kappa + 1.0, sigma + m.kappa) * L ** (-m.kappa) * y ** (sigma + m.kappa - 1.0)


def mu_eval(m: MuParams, t: float) -> float:
    return _mu_log(m, m.log_position(t))


def mu_right_image(m: MuParams, sigma: float, t: float) -> float:
    """Closed form of ``(J_T^sigma mu)(t)``."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma!r}")
    return _mu_image_log(m, sigma, m.log_position(t))


def mu_right_image_tderiv(m: MuParams, sigma: float, t: float) -> float:
    """Closed form of ``t (J_T^sigma mu)'(t)``; never positive."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma!r}")
    return _mu_image_tderiv_log(m, sigma, m.log_position(t))


def phi_weighted_image_at_a(tf: TestFunction, alpha: float) -> float:
    """Scalar ``Gamma(kappa+1)/Gamma(kappa+2-alpha) (ln T/a)**(1-alpha)``.

    Times ``xi_R(x)**ell`` this is ``(J_T^(1-alpha) t phi)(a, x)``, because ``t eta = mu``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    m = tf.mu
    return gamma_ratio(m.kappa + 1.0, m.kappa + 2.0 - alpha) * m.log_ratio ** (1.0 - alpha)


# radial cutoff


def psi(r):
    """Cutoff profile on ``[0, inf)``."""
    return psi_derivatives(r)[0]


def psi_derivatives(r):
    """``(psi, psi', psi'')`` evaluated elementwise."""
    r = np.asarray(r, dtype=float)
    inside = (r > 1.0 + SEAM_GUARD) & (r < 2.0 - SEAM_GUARD)
    val = np.where(r <= 1.0 + SEAM_GUARD, 1.0, 0.0)
    d1 = np.zeros_like(r)
    d2 = np.zeros_like(r)
    if np.any(inside):
        ri = r[inside]
        s, u = 2.0 - ri, ri - 1.0
        E = 1.0 / s - 1.0 / u
        E1 = 1.0 / s**2 + 1.0 / u**2
        E2 = 2.0 / s**3 - 2.0 / u**3
        ps = expit(-E)
        pq = ps * expit(E)  # psi (1 - psi) without cancellation
        p1 = -pq * E1
        p2 = -(p1 * (1.0 - 2.0 * ps) * E1 + pq * E2)
        val[inside] = ps
        d1[inside] = p1
        d2[inside] = p2
    if val.ndim == 0:
        return float(val), float(d1), float(d2)
    return val, d1, d2


def cutoff_eval(c: CutoffParams, x_norm):
    """``xi_R(x) = psi(|x|/R)``."""
    return psi(np.asarray(x_norm, dtype=float) / c.R)


def cutoff_grad_norm(c: CutoffParams, x_norm):
    _, d1, _ = psi_derivatives(np.asarray(x_norm, dtype=float) / c.R)
    return np.abs(d1) / c.R


def cutoff_laplacian(c: CutoffParams, x_norm):
    """Radial Laplacian ``psi''/R**2 + (N-1) psi'/(R |x|)``; ``N psi''(0)/R**2 = 0`` at the origin."""
    x = np.asarray(x_norm, dtype=float)
    _, d1, d2 = psi_derivatives(x / c.R)
    safe = np.where(x > 0.0, x, 1.0)
    out = np.where(x > 0.0, d2 / c.R**2 + (c.N - 1) * d1 / (c.R * safe), c.N * d2 / c.R**2)
    if np.ndim(out) == 0:
        return float(out)
    return out


def laplacian_of_power(c: CutoffParams, x_norm):
    """``Delta(xi**ell) = ell xi**(ell-2) ((ell-1)|grad xi|**2 + xi Delta xi)``."""
    x = np.asarray(x_norm, dtype=float)
    xi = cutoff_eval(c, x)
    g = cutoff_grad_norm(c, x)
    lap = cutoff_laplacian(c, x)
    out = c.ell * xi ** (c.ell - 2) * ((c.ell - 1) * g**2 + xi * lap)
    if np.ndim(out) == 0:
        return float(out)
    return out


def k22_density(c: CutoffParams, p: float, x_norm):
    """``xi**(-ell/(p-1)) |Delta(xi**ell)|**(p/(p-1))`` with the xi powers combined.

    Using the product identity the integrand equals
    ``ell**q xi**(ell - 2q) |(ell-1)|grad xi|**2 + xi Delta xi|**q`` with ``q = p/(p-1)``,
    which is bounded wherever ``ell >= 2q``.
    """
    q = p / (p - 1.0)
    x = np.asarray(x_norm, dtype=float)
    xi = cutoff_eval(c, x)
    g = cutoff_grad_norm(c, x)
    lap = cutoff_laplacian(c, x)
    inner = np.abs((c.ell - 1) * g**2 + xi * lap)
    with np.errstate(divide="ignore", invalid="ignore"):
        pw = np.where(xi > 0.0, xi ** (c.ell - 2.0 * q), 0.0)
    return c.ell**q * pw * inner**q


def cutoff_constants(N: int, R: float = 1.0, n: int = 1000) -> tuple[float, float]:
    """Measured ``sup R |grad xi_R|`` and ``sup R**2 |Delta xi_R|`` over the annulus."""
    c = CutoffParams(R, 2, N)
    r = np.linspace(R, 2.0 * R, n + 2)[1:-1]
    return float(np.max(R * cutoff_grad_norm(c, r))), float(np.max(R**2 * np.abs(cutoff_laplacian(c, r))))

