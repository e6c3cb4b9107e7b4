"""Shared quadrature primitives: Gauss-Legendre panels, dyadic grading, radial moments."""

from __future__ import annotations

import numpy as np
from scipy.special import gammainc, gamma as _gamma
from scipy.special import roots_legendre

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

GRADING_RATIO = 0.5
GRADING_CAP = 60


class QuadratureError(RuntimeError):
    """Raised when a quadrature fails to meet its tolerance within its caps."""


def gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached per order."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = roots_legendre(n)
    return _GL_CACHE[n]


def gl_panel(n: int, a: float, b: float, dtype=np.float64):
    """Nodes/weights on [a, b]."""
    x, w = gl_nodes(n)
    a = dtype(a)
    b = dtype(b)
    mid, hal = (a + b) / 2, (b - a) / 2
    return mid + hal * x.astype(dtype), hal * w.astype(dtype)


def power_moment(s, r, lam=0.0):
    """int_0^r t^s * exp(-lam*t) dt for s > -1, elementwise in s and r.

    lam = 0 reduces to r^(s+1)/(s+1); otherwise the lower incomplete
    gamma function gives the closed form.
    """
    s = np.asarray(s, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if lam == 0.0:
        return r ** (s + 1) / (s + 1)
    return gammainc(s + 1, lam * r) * _gamma(s + 1) * lam ** (-(s + 1))


def dyadic_panels(hi: float, levels: int = GRADING_CAP):
    """Geometrically graded subintervals of (0, hi] toward 0, ratio 1/2."""
    edges = hi * GRADING_RATIO ** np.arange(levels + 1)
    return list(zip(edges[1:], edges[:-1]))


def tail_map_integrate(fn, lower: float, alpha: float, tol: float,
                       order: int = 32, cap: int = GRADING_CAP,
                       dtype=np.float64, what: str = "tail integral"):
    """int_lower^inf fn(s) s^(-1-alpha) ds for vector-valued fn.

    Maps s = lower/t and substitutes tau = t^alpha so a constant fn is
    integrated exactly by a single panel; composite Gauss-Legendre with
    dyadic refinement toward tau = 0 picks up the variation of fn. Stops
    once a panel contributes less than tol/10; the cap signals fn decaying
    too slowly to converge.
    """
    alpha = dtype(alpha)
    lower = dtype(lower)
    pref = lower ** (-alpha) / alpha
    out = None
    hi = dtype(1.0)
    for lev in range(cap + 1):
        lo = hi * dtype(GRADING_RATIO)
        tau, tw = gl_panel(order, lo, hi, dtype)
        s = lower / tau ** (1 / alpha)
        vals = fn(s)  # shape (..., order)
        seg = pref * (vals * tw).sum(axis=-1)
        out = seg if out is None else out + seg
        if np.max(np.abs(seg)) < tol / 10:
            return out
        hi = lo
    raise QuadratureError(
        f"{what} did not converge to tol={tol:g} within {cap} refinement levels"
    )
