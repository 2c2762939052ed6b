"""Ensemble averaging over the quadrature distribution.

The observable tunneling yield averages the per-realization probability
over the Bohmian ensemble,

    P_tot = int_{-inf}^{0} P(X_i) rho(X_i, t_i) dX_i,

truncated at x_min_sigmas standard deviations (the omitted tail is
bounded by the Gaussian mass alone since P <= 1).  The integrand
rho * P is sharply peaked at an interior X_peak < 0: rho favors small
|X_i|, the exponent favors strong fields.  Everything that compares or
maximizes the integrand works on log g = log rho - 2 Im S, because g
spans hundreds of decades across the scan window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import (DivisionByZeroField, NoInteriorMax, NotConverged,
                     NoValidWindow, NumericalError, QuadratureNotConverged,
                     RootNotBracketed)
from .field import FieldRealization, SqueezingParams, rho, sigma
from .solver import BarrierSpec, ContourSpec, im_action, solve_saddle

__all__ = [
    "QuadratureSpec",
    "ScanResult",
    "p_total",
    "find_x_peak",
    "x_levels",
    "e_peak",
    "gamma_peak",
    "scan_r",
    "tunnel_scan_table",
]

ADAPTIVE = "adaptive"
FIXED_GAUSS = "fixed_gauss"


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over initial quadratures: fixed Gauss-Legendre
    nodes on [-x_min_sigmas * sigma, 0] or adaptive quadrature to
    rel_tol."""

    method: str = FIXED_GAUSS
    x_min_sigmas: float = 8.0
    n_nodes: int = 121
    rel_tol: float = 1e-6

    def __post_init__(self):
        if self.method not in (ADAPTIVE, FIXED_GAUSS):
            raise ValueError(f"method must be '{ADAPTIVE}' or '{FIXED_GAUSS}'")
        if not (self.x_min_sigmas > 0.0):
            raise ValueError("x_min_sigmas must be > 0")
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be >= 2")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be > 0")


@dataclass
class ScanResult:
    """Tabulated scan rows plus provenance metadata.  columns names the
    CSV schema; rows are plain tuples sorted by the scan variable."""

    kind: str
    columns: tuple
    rows: list
    meta: dict = dc_field(default_factory=dict)
    row_errors: list = dc_field(default_factory=list)


# ---------------------------------------------------------------------------
# Per-realization probability plumbing

class _SaddleCache:
    """Sequential solver wrapper that warm-starts each node from the
    previous converged saddle (the saddle moves continuously with X_i)."""

    def __init__(self, p: SqueezingParams, t_i: float, b: BarrierSpec,
                 contour: ContourSpec = ContourSpec()):
        self.p = p
        self.t_i = t_i
        self.b = b
        self.contour = contour
        self.last_t0: Optional[complex] = None

    def solve(self, x_i: float):
        fr = FieldRealization(params=self.p, x_i=x_i, t_i=self.t_i)
        sol = solve_saddle(fr, self.b, self.contour, guess=self.last_t0)
        self.last_t0 = sol.t0
        sol.im_action = im_action(fr, self.b, sol, self.contour)
        sol.probability = math.exp(-2.0 * sol.im_action)
        return sol

    def log_prob(self, x_i: float) -> float:
        """-2 Im S, the log of the tunneling probability (underflow-free)."""
        return -2.0 * self.solve(x_i).im_action


def _log_g_fn(p, t_i, prob_fn, cache):
    """log of the integrand g(X) = rho(X) P(X); prob_fn overrides the
    solver pipeline (stub injection for tests)."""

    def log_g(x):
        lr = float(np.log(rho(x, t_i, p)))
        if prob_fn is not None:
            pv = float(prob_fn(x))
            return lr + (math.log(pv) if pv > 0.0 else -math.inf)
        try:
            return lr + cache.log_prob(x)
        except NoValidWindow:
            return -math.inf
    return log_g


def p_total(p: SqueezingParams, t_i: float, b: BarrierSpec,
            q: QuadratureSpec,
            prob_fn: Optional[Callable[[float], float]] = None) -> float:
    """Quadrature-averaged tunneling probability over X_i < 0.

    prob_fn substitutes the per-realization probability (test stubs);
    default is the full saddle-point pipeline with warm starts along the
    node sweep.  Failed nodes contribute zero; more than 1% of failed
    nodes raises QuadratureNotConverged rather than silently biasing
    the average.
    """
    val, n_failed, n_nodes = _p_total_counted(p, t_i, b, q, prob_fn)
    if n_failed * 100 > n_nodes:
        raise QuadratureNotConverged(
            f"{n_failed}/{n_nodes} quadrature nodes failed to converge")
    return val


def _p_total_counted(p, t_i, b, q, prob_fn=None):
    sig = float(sigma(t_i, p))
    lo = -q.x_min_sigmas * sig
    cache = _SaddleCache(p, t_i, b) if prob_fn is None else None

    def integrand(x):
        if prob_fn is not None:
            return float(rho(x, t_i, p)) * float(prob_fn(x))
        try:
            sol = cache.solve(x)
        except NoValidWindow:
            return 0.0
        return float(rho(x, t_i, p)) * sol.probability

    if q.method == ADAPTIVE:
        from scipy.integrate import quad
        counts = [0, 0]

        def counted(x):
            counts[0] += 1
            try:
                return integrand(x)
            except (NotConverged, NumericalError):
                counts[1] += 1
                return 0.0

        val, _err = quad(counted, lo, 0.0, epsabs=1e-300, epsrel=q.rel_tol,
                         limit=200)
        return val, counts[1], max(1, counts[0])
    nodes, weights = _gauss_nodes(lo, 0.0, q.n_nodes)
    total = 0.0
    n_failed = 0
    # ascending X: |x_i| shrinks, saddle height grows smoothly; keyed
    # accumulation in index order for bitwise reproducibility
    for x, w in zip(nodes, weights):
        try:
            total += w * integrand(float(x))
        except (NotConverged, NumericalError):
            n_failed += 1
    return total, n_failed, len(nodes)


def _gauss_nodes(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


def find_x_peak(p: SqueezingParams, t_i: float, b: BarrierSpec,
                q: QuadratureSpec = QuadratureSpec(),
                prob_fn: Optional[Callable[[float], float]] = None):
    """Locate the dominant realization: argmax of g(X) = rho(X) P(X) on
    [-x_min_sigmas * sigma, 0).

    Coarse grid to bracket the interior maximum, then bounded scalar
    maximization of log g to 1e-8 * sigma in X.  Returns
    (X_peak, g(X_peak)).  Raises NoInteriorMax when the grid argmax sits
    on the bracket boundary (monotone g).
    """
    sig = float(sigma(t_i, p))
    lo = -q.x_min_sigmas * sig
    cache = _SaddleCache(p, t_i, b) if prob_fn is None else None
    log_g = _log_g_fn(p, t_i, prob_fn, cache)

    # upper grid end at -1e-3 sigma: closer to zero the local Keldysh
    # parameter exceeds 1e4 and rho * P lies hundreds of decades below
    # any interior peak, while the saddle height grows without bound
    n_grid = 33
    xs = np.linspace(lo, -1e-3 * sig, n_grid)
    vals = np.array([log_g(float(x)) for x in xs])
    if not np.any(np.isfinite(vals)):
        raise NoInteriorMax("integrand vanishes on the whole bracket")
    k = int(np.nanargmax(np.where(np.isfinite(vals), vals, -np.inf)))
    if k == 0 or k == n_grid - 1:
        raise NoInteriorMax(
            f"rho * P is monotone on [{lo:.6g}, 0): grid argmax at boundary")
    res = minimize_scalar(lambda x: -log_g(float(x)),
                          bounds=(float(xs[k - 1]), float(xs[k + 1])),
                          method="bounded",
                          options={"xatol": 1e-8 * sig})
    x_peak = float(res.x)
    return x_peak, math.exp(-float(res.fun))


def x_levels(p: SqueezingParams, t_i: float, b: BarrierSpec,
             fractions, q: QuadratureSpec = QuadratureSpec(),
             prob_fn: Optional[Callable[[float], float]] = None):
    """Initial quadratures X_l with g(X_l) = f * g(X_peak), one per
    fraction, taken on the larger-|X| side of the peak (the family used
    for the released-trajectory fan).  f = 1 returns X_peak itself."""
    for f in fractions:
        if not (0.0 < f <= 1.0):
            raise ValueError(f"fractions must lie in (0, 1], got {f}")
    sig = float(sigma(t_i, p))
    lo = -q.x_min_sigmas * sig
    cache = _SaddleCache(p, t_i, b) if prob_fn is None else None
    log_g = _log_g_fn(p, t_i, prob_fn, cache)
    x_peak, _ = find_x_peak(p, t_i, b, q, prob_fn)
    lg_max = log_g(x_peak)

    out = []
    lg_lo = log_g(lo)
    for f in fractions:
        if f == 1.0:
            out.append(x_peak)
            continue
        target = lg_max + math.log(f)
        if not (lg_lo < target):
            raise RootNotBracketed(
                f"g({lo:.6g}) exceeds {f} * g_max; widen x_min_sigmas")
        root = brentq(lambda x: log_g(x) - target, lo, x_peak,
                      xtol=1e-12 * sig, rtol=8.9e-16)
        out.append(float(root))
    return out


def e_peak(p: SqueezingParams, t_i: float, x_peak: float,
           n_dense: int = 2048) -> float:
    """Maximum |E| over one field period pi/omega along the realization
    pinned at x_peak.

    |E| vanishes at the field edges and at mid-window and is symmetric
    about mid-window, so the search covers the half window after an
    edge: dense uniform samples plus a log-spaced ladder (the crest sits
    about e^{-r}/omega behind the edge, invisible to a uniform grid at
    large r), then bounded refinement in the log offset.  n_dense is
    exposed only for the self-convergence check.
    """
    if p.r == 0.0 or x_peak == 0.0:
        return 0.0
    from .solver import _BsvEdgeDrive
    from .field import edge_after

    fr = FieldRealization(params=p, x_i=x_peak, t_i=t_i)
    te = edge_after(p, t_i)
    drive = _BsvEdgeDrive(fr, te)
    half_window = 0.5 * math.pi / p.omega

    cand = np.concatenate([
        np.linspace(half_window / n_dense, half_window, n_dense),
        np.exp(np.linspace(math.log(math.exp(-p.r - 3.0) / p.omega),
                           math.log(half_window), 96)),
    ])
    mags = np.abs(drive.e_real(cand))
    d0 = float(cand[int(np.argmax(mags))])
    res = minimize_scalar(lambda s: -abs(float(drive.e_real(math.exp(s)))),
                          bounds=(math.log(d0) - math.log(4.0),
                                  min(math.log(half_window),
                                      math.log(d0) + math.log(4.0))),
                          method="bounded",
                          options={"xatol": 1e-10})
    return float(-res.fun)


def gamma_peak(e_peak_value: float, b: BarrierSpec, omega: float) -> float:
    """Effective Keldysh parameter omega sqrt(2 m dU) / (q E_peak)."""
    if e_peak_value == 0.0:
        raise DivisionByZeroField("gamma_peak undefined for zero peak field")
    return omega * math.sqrt(2.0 * b.mass * b.delta_u) / (b.charge * abs(e_peak_value))


def tunnel_scan_table(p: SqueezingParams, t_i: float, b: BarrierSpec,
                      q: QuadratureSpec) -> ScanResult:
    """Per-realization scan over the quadrature node grid: rows
    (X_i, rho, P, rho_P, re_t0, im_t0, im_S, converged) ascending in
    X_i.  Non-converged nodes appear with converged = 0 and NaN saddle
    data rather than aborting the scan."""
    sig = float(sigma(t_i, p))
    lo = -q.x_min_sigmas * sig
    nodes, _w = _gauss_nodes(lo, 0.0, q.n_nodes)
    cache = _SaddleCache(p, t_i, b)
    rows = []
    errors = []
    for k, x in enumerate(nodes):
        x = float(x)
        rv = float(rho(x, t_i, p))
        try:
            sol = cache.solve(x)
            rows.append((x, rv, sol.probability, rv * sol.probability,
                         sol.t0.real, sol.t0.imag, sol.im_action, 1))
        except (NotConverged, NumericalError) as exc:
            errors.append(f"node {k} (X_i = {x:.6g}): {type(exc).__name__}: {exc}")
            rows.append((x, rv, 0.0, 0.0, math.nan, math.nan, math.nan, 0))
    return ScanResult(kind="tunnel_scan",
                      columns=("X_i", "rho", "P", "rho_P", "re_t0", "im_t0",
                               "im_S", "converged"),
                      rows=rows,
                      meta={"r": p.r, "sigma": sig, "t_i": t_i},
                      row_errors=errors)


def scan_r(r_list, p_template: SqueezingParams, t_i: float, b: BarrierSpec,
           q: QuadratureSpec) -> ScanResult:
    """Squeezing scan: one row (r, sigma, X_peak, E_peak, gamma_peak,
    P_tot, n_failed_nodes) per requested r, sorted ascending.

    A failed row is flagged with NaN values and n_failed_nodes = -1
    instead of aborting the whole scan; messages accumulate in
    row_errors.
    """
    if len(list(r_list)) == 0:
        raise ValueError("r_list must be non-empty")
    rows = []
    errors = []
    for r in sorted(float(rr) for rr in r_list):
        if r < 0:
            raise ValueError(f"r must be >= 0, got {r}")
        try:
            rows.append(scan_one_r(r, p_template, t_i, b, q))
        except (NumericalError, ValueError) as exc:
            errors.append(f"r = {r:g}: {type(exc).__name__}: {exc}")
            sig = float(sigma(t_i, SqueezingParams(
                r=r, phi=p_template.phi, omega=p_template.omega,
                field_scale=p_template.field_scale)))
            rows.append((r, sig, math.nan, math.nan, math.nan, math.nan, -1))
    return ScanResult(kind="ptot_scan",
                      columns=("r", "sigma", "X_peak", "E_peak", "gamma_peak",
                               "P_tot", "n_failed_nodes"),
                      rows=rows,
                      meta={"t_i": t_i},
                      row_errors=errors)


def scan_one_r(r: float, p_template: SqueezingParams, t_i: float,
               b: BarrierSpec, q: QuadratureSpec):
    """Single squeezing row of scan_r; shared by the parallel workers."""
    p = SqueezingParams(r=r, phi=p_template.phi, omega=p_template.omega,
                        field_scale=p_template.field_scale)
    sig = float(sigma(t_i, p))
    x_pk, _gv = find_x_peak(p, t_i, b, q)
    e_pk = e_peak(p, t_i, x_pk)
    g_pk = gamma_peak(e_pk, b, p.omega)
    val, n_failed, n_nodes = _p_total_counted(p, t_i, b, q)
    if n_failed * 100 > n_nodes:
        raise QuadratureNotConverged(
            f"{n_failed}/{n_nodes} quadrature nodes failed at r = {r:g}")
    return (r, sig, float(x_pk), float(e_pk), float(g_pk), float(val),
            int(n_failed))
