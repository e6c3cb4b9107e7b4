"""Boundary contributions for extended Dirichlet data: exterior lattice sums
plus the semi-infinite tail/region integrals carrying g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quad import GRADING_CAP, QuadratureError, gl_panel
from .fastop import lattice_correlate
from .kernel import FieldFn, Grid, KernelSpec
from .stencil import StencilCoefficients1D, StencilCoefficients2D


@dataclass(frozen=True)
class BoundaryVector:
    """Interior-sized boundary term, pre-scaled for direct addition to the matvec."""

    values: np.ndarray
    quad_tol: float


def tail_integral_1d(g, x, L: float, alpha: float, lam: float = 0.0,
                     tol: float = 1e-12, order: int = 32,
                     dtype=np.float64) -> np.ndarray:
    """int_L^inf [g(x - s) + g(x + s)] K(s) s^(-1-alpha) ds at each node x.

    Maps s = L/t with tau = t^alpha, making constant g exact on every panel,
    then refines dyadically toward tau = 0 until a panel contributes less
    than tol/10. Nonconvergence within the level cap signals g decaying too
    slowly for the integral to exist numerically.
    """
    x = np.atleast_1d(np.asarray(x, dtype=dtype))
    if isinstance(g, FieldFn) and g.is_zero:
        return np.zeros_like(x)
    alpha_t = dtype(alpha)
    pref = dtype(L) ** (-alpha_t) / alpha_t
    out = np.zeros_like(x)
    hi = dtype(1.0)
    for lev in range(GRADING_CAP + 1):
        lo = hi / 2
        tau, tw = gl_panel(order, lo, hi, dtype)
        s = dtype(L) / tau ** (1 / alpha_t)
        if lam > 0.0:
            tw = tw * np.exp(-lam * s)
        seg = pref * ((g(x[:, None] - s[None, :]) + g(x[:, None] + s[None, :])) * tw).sum(axis=1)
        out += seg
        if np.max(np.abs(seg)) < tol / 10:
            return out
        hi = lo
    raise QuadratureError(
        f"1D tail integral did not reach tol={tol:g} within {GRADING_CAP} levels; "
        "boundary data may decay too slowly"
    )


def exterior_mask_1d(grid: Grid) -> np.ndarray:
    """Extended-lattice mask: True where the lattice node is outside the open box."""
    N = grid.N[0]
    j = np.arange(1 - N, 2 * N)
    return (j <= 0) | (j >= N)


def boundary_vector_1d(g, coeffs: StencilCoefficients1D, grid: Grid,
                       spec: KernelSpec, tol: float = 1e-12) -> BoundaryVector:
    """Exterior lattice sums plus the tail integral, scaled by -c."""
    N = grid.N[0]
    if coeffs.N != N:
        raise ValueError("stencil and grid disagree on N")
    x = grid.interior_nodes()
    if isinstance(g, FieldFn) and g.is_zero:
        return BoundaryVector(values=np.zeros(N - 1), quad_tol=tol)
    lattice = grid.a[0] + grid.h * np.arange(1 - N, 2 * N)
    u_ext = np.where(exterior_mask_1d(grid), g(lattice), 0.0)
    vals = lattice_correlate(coeffs.a, u_ext)
    vals += tail_integral_1d(g, x, grid.L, spec.alpha, spec.lam, tol)
    return BoundaryVector(values=-spec.c * vals, quad_tol=tol)


# --- 2D exterior-region integrals ---------------------------------------------


def exterior_region_integral_2d(g, X, Y, L: float, alpha: float,
                                lam: float = 0.0, tol: float = 1e-10,
                                n_theta: int = 32, order_r: int = 16) -> np.ndarray:
    """Sum over the four sign patterns of the integral of
    g(x + s o xi) K(|xi|) |xi|^(-(2+alpha)) over the positive quadrant minus
    [0, L]^2, for every node (X, Y) at once.

    Polar decomposition: two angular octants with inner radius L/cos(theta'),
    radial direction mapped like the 1D tail (r = R/t, tau = t^alpha) and
    refined dyadically until the level contribution drops below tol/10.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if isinstance(g, FieldFn) and g.is_zero:
        return np.zeros_like(X)
    thq, thw = gl_panel(n_theta, 0.0, np.pi / 4.0)
    out = np.zeros_like(X)
    # octants: (cos, sin) and the swapped one; both share R = L/cos(theta')
    for cdir, sdir in ((np.cos(thq), np.sin(thq)), (np.sin(thq), np.cos(thq))):
        Rin = L / np.maximum(cdir, sdir)
        radial_w = thw * Rin ** (-alpha) / alpha
        hi = 1.0
        acc = np.zeros_like(X)
        converged = False
        for lev in range(GRADING_CAP + 1):
            lo = hi / 2
            tau, tw = gl_panel(order_r, lo, hi)
            t = tau ** (1.0 / alpha)
            r = Rin[:, None] / t[None, :]           # (n_theta, order_r)
            w = radial_w[:, None] * tw[None, :]
            if lam > 0.0:
                w = w * np.exp(-lam * r)
            xi1 = (r * cdir[:, None]).ravel()
            xi2 = (r * sdir[:, None]).ravel()
            wf = w.ravel()
            seg = np.zeros_like(X)
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    gv = g(X[..., None] + s1 * xi1, Y[..., None] + s2 * xi2)
                    seg += gv @ wf
            acc += seg
            if np.max(np.abs(seg)) < tol / 10:
                converged = True
                break
            hi = lo
        if not converged:
            raise QuadratureError(
                f"2D exterior integral did not reach tol={tol:g} within "
                f"{GRADING_CAP} levels; boundary data may decay too slowly"
            )
        out += acc
    return out


def exterior_mask_2d(grid: Grid) -> np.ndarray:
    N = grid.n_weight
    N1, N2 = grid.N
    j1 = np.arange(1 - N, N1 + N)
    j2 = np.arange(1 - N, N2 + N)
    out1 = (j1 <= 0) | (j1 >= N1)
    out2 = (j2 <= 0) | (j2 >= N2)
    return out1[:, None] | out2[None, :]


def boundary_vector_2d(g, coeffs: StencilCoefficients2D, grid: Grid,
                       spec: KernelSpec, tol: float = 1e-10) -> BoundaryVector:
    """Exterior lattice correlation plus per-node far-field integrals, scaled by -c."""
    N = grid.n_weight
    if coeffs.N != N:
        raise ValueError("stencil and grid disagree on N")
    shape = grid.interior_shape()
    if isinstance(g, FieldFn) and g.is_zero:
        return BoundaryVector(values=np.zeros(int(np.prod(shape))), quad_tol=tol)
    lat1 = grid.a[0] + grid.h * np.arange(1 - N, grid.N[0] + N)
    lat2 = grid.a[1] + grid.h * np.arange(1 - N, grid.N[1] + N)
    L1, L2 = np.meshgrid(lat1, lat2, indexing="ij")
    G = np.where(exterior_mask_2d(grid), g(L1, L2), 0.0)
    vals = lattice_correlate(coeffs.a, G)
    pts = grid.interior_nodes()
    X = pts[:, 0].reshape(shape)
    Y = pts[:, 1].reshape(shape)
    vals += exterior_region_integral_2d(g, X, Y, grid.L, spec.alpha, spec.lam, tol)
    return BoundaryVector(values=-spec.c * vals.ravel(), quad_tol=tol)
