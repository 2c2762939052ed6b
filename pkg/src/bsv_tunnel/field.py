"""Bohmian dynamics of a single-mode squeezed vacuum field.

The X quadrature of a squeezed vacuum stays Gaussian at all times,

    rho(X, t) = sqrt(c_r(t)/pi) exp(-c_r(t) X^2),
    c_r(t) = 1/u(t),   u(t) = cos(theta) sinh(2r) + cosh(2r),
    theta = phi - 2 omega t,

so the probability flow lines (Bohmian trajectories) are self-similar:
X(t) = x_i sqrt(u(t)/u(t_i)).  Each trajectory, multiplied by the field
scale sqrt(hbar omega / eps0 V), is one classical realization of the
electric field E(t).  The tunneling solver needs E at complex times,
which requires tracking the branch of sqrt(u) continuously; u has
complex zeros at t_edge +/- i zeta above every minimum of u, and the
branch is defined here by continuation vertically from the real axis.

All quantities in Hartree atomic units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguity

__all__ = [
    "SqueezingParams",
    "FieldRealization",
    "c_coeff",
    "c_r_coeff",
    "rho",
    "sigma",
    "x_trajectory",
    "p_trajectory",
    "e_field",
    "sample_initial",
    "u_val",
    "du_dt",
    "sqrt_u_continued",
    "edge_before",
    "edge_after",
    "u_zero_offset",
]


@dataclass(frozen=True)
class SqueezingParams:
    """Single-mode squeezed vacuum: squeezing factor, phase, frequency,
    and the single-photon field scale sqrt(hbar omega / eps0 V).

    Parameters
    ----------
    r : float
        Dimensionless squeezing factor, >= 0.
    phi : float
        Squeezing phase in radians.
    omega : float
        Mode angular frequency, a.u.
    field_scale : float
        Electric field per quadrature unit, a.u.
    """

    r: float
    phi: float = 0.0
    omega: float = 0.0285
    field_scale: float = math.sqrt(2.0) * 1e-8

    def __post_init__(self):
        if not (self.r >= 0.0):
            raise ValueError(f"squeezing factor must be >= 0, got {self.r}")
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not (self.field_scale > 0.0):
            raise ValueError(f"field_scale must be > 0, got {self.field_scale}")

    @property
    def period(self) -> float:
        """Period of the intensity envelope, pi/omega (u has two minima
        per optical cycle)."""
        return math.pi / self.omega


@dataclass(frozen=True)
class FieldRealization:
    """One Bohmian trajectory of the field mode, pinned by the quadrature
    value x_i observed at time t_i."""

    params: SqueezingParams
    x_i: float
    t_i: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.x_i):
            raise ValueError("x_i must be finite")


def _theta(t, p: SqueezingParams):
    return p.phi - 2.0 * p.omega * np.asarray(t)


def u_val(t, p: SqueezingParams):
    """Inverse Gaussian coefficient u(t) = 1/c_r(t), valid for real or
    complex t.  Written in a cancellation-free form: the naive
    cos(theta) sinh + cosh loses all precision near the minima where
    u = e^{-2r}."""
    th = _theta(t, p)
    s2r = math.sinh(2.0 * p.r)
    # cos(th)*s2r + cosh(2r) == e^{-2r} + 2 s2r cos^2(th/2), exactly
    return math.exp(-2.0 * p.r) + 2.0 * s2r * np.cos(0.5 * th) ** 2


def du_dt(t, p: SqueezingParams):
    """Time derivative of u(t)."""
    return 2.0 * p.omega * math.sinh(2.0 * p.r) * np.sin(_theta(t, p))


def c_coeff(t, p: SqueezingParams):
    """Quadrature coupling c(t) = -sin(theta) sinh(2r) / u(t), the
    coefficient in P = -c X.  Bounded since u >= e^{-2r} > 0."""
    th = _theta(t, p)
    return -np.sin(th) * math.sinh(2.0 * p.r) / u_val(t, p)


def c_r_coeff(t, p: SqueezingParams):
    """Gaussian width coefficient c_r(t) = 1/u(t), in [e^{-2r}, e^{2r}]."""
    return 1.0 / u_val(t, p)


def sigma(t, p: SqueezingParams):
    """Standard deviation of rho(X, t): sigma(t) = 1/sqrt(2 c_r)."""
    return np.sqrt(0.5 * u_val(t, p))


def rho(x, t, p: SqueezingParams):
    """Quadrature probability density rho(X, t), a normalized Gaussian."""
    cr = c_r_coeff(t, p)
    return np.sqrt(cr / np.pi) * np.exp(-cr * np.asarray(x) ** 2)


def x_trajectory(fr: FieldRealization, t):
    """Bohmian flow line X(t) = x_i sqrt(u(t)/u(t_i)).

    Exact solution of dX/dt = omega P(X, t); never changes sign.
    """
    p = fr.params
    return fr.x_i * np.sqrt(u_val(t, p) / u_val(fr.t_i, p))


def p_trajectory(fr: FieldRealization, t):
    """Conjugate quadrature P(t) = -c(t) X(t) = dX/dt / omega."""
    return -c_coeff(t, fr.params) * x_trajectory(fr, t)


def e_field(fr: FieldRealization, t, *, branch_guard_radius: float = 0.0):
    """Electric field of the realization, E(t) = field_scale * P(t),
    for real or complex t.

    Complex evaluation continues sqrt(u) vertically from the real axis
    (see `sqrt_u_continued`); on the real axis the result is real to
    rounding.  With a positive `branch_guard_radius`, evaluation points
    within that distance of a zero of u raise BranchAmbiguity instead of
    risking an untracked branch flip.

    Returns a complex scalar or array matching the shape of t.
    """
    p = fr.params
    ts = np.asarray(t, dtype=complex)
    if branch_guard_radius > 0.0:
        _check_guard(p, ts, branch_guard_radius)
    s = sqrt_u_continued(ts, p)
    sq_ui = math.sqrt(u_val(fr.t_i, p))
    th = _theta(ts, p)
    out = p.field_scale * fr.x_i * math.sinh(2.0 * p.r) * np.sin(th) / (sq_ui * s)
    if out.shape == ():
        return complex(out)
    return out


def sample_initial(p: SqueezingParams, t_i: float, n: int, seed: int,
                   negative_only: bool = False) -> np.ndarray:
    """Draw n i.i.d. initial quadratures from rho(X, t_i).

    negative_only reflects samples to X < 0 via -|X| (the density is
    even, so this is exact and halves the variance of one-sided
    averages).  Deterministic for a fixed seed.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    xs = rng.normal(0.0, float(sigma(t_i, p)), size=n)
    if negative_only:
        xs = -np.abs(xs)
    return xs


# ---------------------------------------------------------------------------
# Branch tracking and edge geometry

def edge_before(p: SqueezingParams, t: float) -> float:
    """Largest edge time <= t.  Edges are the minima of u (theta = pi
    mod 2pi), where the field profile jumps for large r."""
    k = math.floor((2.0 * p.omega * t - p.phi + math.pi) / (2.0 * math.pi))
    return (p.phi - math.pi + 2.0 * math.pi * k) / (2.0 * p.omega)


def edge_after(p: SqueezingParams, t: float) -> float:
    """Smallest edge time > t."""
    te = edge_before(p, t)
    half = math.pi / p.omega
    # te > t only when rounding pushed edge_before past t; then te
    # already is the strictly-next edge, including for t exactly on one
    return te + half if te <= t else te


def u_zero_offset(p: SqueezingParams) -> float:
    """Imaginary distance zeta from an edge to the nearest zero of u:
    the zeros sit at t_edge +/- i zeta."""
    if p.r == 0.0:
        return math.inf
    s0 = math.sqrt(math.exp(-2.0 * p.r) / (2.0 * math.sinh(2.0 * p.r)))
    return math.asinh(s0) / p.omega


def _check_guard(p: SqueezingParams, ts: np.ndarray, radius: float):
    zeta = u_zero_offset(p)
    if not math.isfinite(zeta):
        return
    half = math.pi / p.omega
    re = ts.real.ravel()
    im = ts.imag.ravel()
    # distance to nearest edge vertical, then to the zero at height zeta
    dre = np.abs((re - edge_before(p, 0.0) + 0.5 * half) % half - 0.5 * half)
    dist = np.hypot(dre, np.abs(im) - zeta)
    if np.any(dist < radius):
        raise BranchAmbiguity(
            f"evaluation point within {radius:g} of a zero of u(t)")


def sqrt_u_continued(ts, p: SqueezingParams):
    """sqrt(u(t)) continued from the real axis, elementwise.

    For each t = a + ib the branch is fixed by walking u along the
    vertical segment from (a, 0) to (a, b) and accumulating the argument
    continuously.  The walk uses a log-spaced ladder (u varies over many
    decades within e^{-2r} of an edge) plus midpoint refinement wherever
    the phase step exceeds 1 rad.  Real inputs short-circuit to the
    positive root.

    Raises BranchAmbiguity if refinement cannot resolve the phase, which
    happens only when the segment passes through or extremely close to a
    zero of u.
    """
    ts = np.asarray(ts, dtype=complex)
    flat = ts.ravel()
    b = flat.imag
    if np.all(b == 0.0):
        u = u_val(flat.real, p).astype(complex)
        return np.sqrt(u).reshape(ts.shape)
    k0 = max(8, int(8 + 2 * np.max(np.abs(b)) * p.omega))
    lam = np.unique(np.concatenate([
        [0.0], np.geomspace(1e-16, 1.0, 48), np.linspace(0.0, 1.0, k0 + 1)]))
    for _ in range(40):
        grid = flat.real[None, :] + 1j * b[None, :] * lam[:, None]
        u = u_val(grid, p)
        if not np.all(np.isfinite(u)):
            raise BranchAmbiguity("u(t) overflowed along the tracking segment")
        dang = np.angle(u[1:] / u[:-1])
        bad = np.abs(dang) >= 1.0
        if not bad.any():
            th_tot = np.angle(u[0]) + np.sum(dang, axis=0)
            s = np.sqrt(np.abs(u[-1])) * np.exp(0.5j * th_tot)
            return s.reshape(ts.shape)
        rows = np.nonzero(bad.any(axis=1))[0]
        mids = 0.5 * (lam[rows] + lam[rows + 1])
        lam = np.unique(np.concatenate([lam, mids]))
        if lam.size > 20000:
            break
    raise BranchAmbiguity("could not track the branch of sqrt(u); "
                          "path passes too close to a zero of u(t)")
