"""Complex-plane path integration for the action integrals.

Straight-segment adaptive Gauss-Legendre quadrature.  The integrands
(field antiderivative, Lagrangian) are analytic along admissible
contours, so fixed-order panels converge spectrally; adaptivity only has
to localize the e^{-2r}-wide edge features of strongly squeezed drives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureNotConverged

__all__ = ["ContourSpec", "integrate_segment", "integrate_polyline"]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)

VERTICAL_THEN_REAL = "vertical_then_real"
STRAIGHT_LINE = "straight_line"
_SHAPES = (VERTICAL_THEN_REAL, STRAIGHT_LINE)


@dataclass(frozen=True)
class ContourSpec:
    """How to route the complex-time contour from t0 down to the real
    axis.

    shape
        "vertical_then_real": drop vertically from t0 to Re t0, then run
        along the real axis if the endpoint lies beyond Re t0.
        "straight_line": single straight segment from t0 to the real
        endpoint.  Both give identical actions (analyticity); having two
        is a consistency check, not a feature.
    max_step
        Upper bound on the branch-tracking step along the contour, a.u.
    branch_guard_radius
        Refuse evaluation within this distance of a zero of u(t);
        0 disables the guard (branch tracking fails loudly on its own).
    """

    shape: str = VERTICAL_THEN_REAL
    max_step: float = 0.5
    branch_guard_radius: float = 0.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ValueError(f"contour shape must be one of {_SHAPES}")
        if not (self.max_step > 0.0):
            raise ValueError("max_step must be > 0")


def _panel(fvec, a: complex, b: complex) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.sum(fvec(mid + half * _GL_X) * _GL_W, axis=1)


def integrate_segment(fvec, a: complex, b: complex, rel: float = 1e-13,
                      max_depth: int = 40) -> np.ndarray:
    """Integrate a vector integrand along the straight segment a -> b.

    fvec maps an array of complex points to an array of shape
    (n_components, n_points); the return value has one entry per
    component.  Panels are accepted against a relative tolerance or
    against a global error budget distributed by arc length, whichever
    is looser; the budget keeps a short, wildly-varying edge panel from
    demanding precision the full integral does not need.

    Raises QuadratureNotConverged if the depth limit is reached while
    the local error estimate is still more than 1e3 times its share of
    the budget.
    """
    if a == b:
        probe = np.asarray(fvec(np.array([a])))
        return np.zeros(probe.shape[0], dtype=complex)
    whole = _panel(fvec, a, b)
    budget = rel * (np.abs(whole) + 1e-300)
    total_len = abs(b - a)
    out = np.zeros_like(whole)
    stack = [(a, b, whole, 0)]
    while stack:
        sa, sb, coarse, depth = stack.pop()
        m = 0.5 * (sa + sb)
        left = _panel(fvec, sa, m)
        right = _panel(fvec, m, sb)
        fine = left + right
        err = np.abs(fine - coarse)
        frac = abs(sb - sa) / total_len
        ok = ((err <= rel * np.abs(fine))
              | (err <= budget * frac)
              | (err <= 1e-16 * np.abs(whole) + 1e-300))
        if np.all(ok) or depth >= max_depth:
            if depth >= max_depth and not np.all(
                    err <= 1e3 * np.maximum(rel * np.abs(fine), budget * frac)):
                raise QuadratureNotConverged(
                    f"panel error {err.max():.3e} at depth {depth}")
            out += fine
        else:
            stack.append((sa, m, left, depth + 1))
            stack.append((m, sb, right, depth + 1))
    return out


def integrate_polyline(fvec, vertices, rel: float = 1e-13) -> np.ndarray:
    """Integrate along consecutive straight segments through `vertices`."""
    vs = [complex(v) for v in vertices]
    if len(vs) < 2:
        raise ValueError("need at least two vertices")
    total = None
    for a, b in zip(vs[:-1], vs[1:]):
        part = integrate_segment(fvec, a, b, rel=rel)
        total = part if total is None else total + part
    return total


def contour_vertices(spec: ContourSpec, t0: complex, t_end: float):
    """Vertex list for the contour from complex t0 to real t_end."""
    tau0 = t0.real
    if spec.shape == STRAIGHT_LINE:
        return [t0, complex(t_end, 0.0)]
    if abs(t_end - tau0) == 0.0:
        return [t0, complex(tau0, 0.0)]
    return [t0, complex(tau0, 0.0), complex(t_end, 0.0)]
