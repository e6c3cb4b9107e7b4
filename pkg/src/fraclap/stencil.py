"""Scheme coefficients: per-node stencil tables and the far-field measures.

The xi -> 0 limit of the difference quotient only enters at gamma = 2 (the
floor(gamma/2) switch). Its value is approximated from the nearest lattice
quotients at the order of the basis: the plain nearest-neighbor value for
p in {0, 1}, and the h^4-accurate Richardson combination for p = 2 (the
plain fold would cap the quadratic basis at O(h^(4-alpha))).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quad import gl_panel, tail_map_integrate
from .kernel import Grid, KernelSpec
from .weights import WeightTable1D, WeightTable2D

# (node, weight) combinations approximating the xi -> 0 limit of the
# difference quotient from lattice values, per basis degree.
_FOLD_1D = {
    0: ((1, 1.0),),
    1: ((1, 1.0),),
    2: ((1, 4.0 / 3.0), (2, -1.0 / 3.0)),
}
# 2D: same combinations applied to the average of the two axis quotients.
_FOLD_2D = {
    0: ((1, 0.5),),
    1: ((1, 0.5),),
    2: ((1, 2.0 / 3.0), (2, -1.0 / 6.0)),
}


@dataclass(frozen=True)
class StencilCoefficients1D:
    a: np.ndarray                # per-node coefficients a[0..N]
    zeta: int
    farfield_measure: float

    @property
    def N(self) -> int:
        return len(self.a) - 1


@dataclass(frozen=True)
class StencilCoefficients2D:
    a: np.ndarray                # per-node coefficients a[0..N, 0..N]
    zeta: int
    farfield_measure: float

    @property
    def N(self) -> int:
        return self.a.shape[0] - 1


def farfield_measure_1d(spec: KernelSpec, L: float, tol: float = 1e-15) -> float:
    """int_L^inf K(s) s^(-1-alpha) ds; closed form 1/(alpha L^alpha) for K = 1."""
    if not spec.tempered:
        return 1.0 / (spec.alpha * L ** spec.alpha)
    lam = spec.lam
    val = tail_map_integrate(lambda s: np.exp(-lam * s)[None, :], L, spec.alpha,
                             tol, what="tempered far-field measure")
    return float(val[0])


def farfield_measure_2d(alpha: float, L: float, tol: float = 1e-12,
                        lam: float = 0.0) -> float:
    """Integral of K(|xi|) |xi|^(-(2+alpha)) over the positive quadrant minus [0, L]^2.

    Polar decomposition: the region is {r > R(theta)} with R = L/cos(theta')
    on both octants, so the radial integral reduces to R^(-alpha)/alpha for
    the power kernel (a mapped radial quadrature handles tempering) and only
    a smooth angular integral remains.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    if L <= 0.0:
        raise ValueError(f"L must be positive, got {L}")
    thq, thw = gl_panel(48, 0.0, np.pi / 4.0)
    Rin = L / np.cos(thq)
    if lam == 0.0:
        radial = Rin ** (-alpha) / alpha
    else:
        # radial integrals int_Rin^inf e^(-lam s) s^(-1-alpha) ds, one per angle
        radial = np.array([
            tail_map_integrate(lambda s: np.exp(-lam * s)[None, :], R, alpha, tol,
                               what="tempered 2D far-field")[0]
            for R in Rin
        ])
    return float(2.0 * thw @ radial)


def _mismatch_check(w_len: int, grid: Grid):
    if w_len != grid.n_weight + 1:
        raise ValueError(
            f"weight table built for N={w_len - 1}, grid needs N={grid.n_weight}"
        )


def coeffs_1d(w: WeightTable1D, spec: KernelSpec, grid: Grid) -> StencilCoefficients1D:
    """Assemble a[0..N] from the 1D weight table."""
    if spec.d != 1 or grid.d != 1:
        raise ValueError("coeffs_1d needs 1D spec and grid")
    _mismatch_check(len(w.values), grid)
    N, h, gam = grid.n_weight, grid.h, spec.gamma
    xi = np.arange(N + 1) * h
    a = np.zeros(N + 1)
    a[1:] = w.values[1:] / xi[1:] ** gam
    zeta = spec.zeta
    if zeta:
        for node, fw in _FOLD_1D[w.p]:
            a[node] += fw * w.values[0] / xi[node] ** gam
    F = farfield_measure_1d(spec, grid.L)
    a[0] = -2.0 * (a[1:].sum() + F)
    return StencilCoefficients1D(a=a, zeta=zeta, farfield_measure=F)


def coeffs_2d(w: WeightTable2D, spec: KernelSpec, grid: Grid,
              tol: float = 1e-12) -> StencilCoefficients2D:
    """Assemble the per-node coefficient table a[0..N, 0..N].

    Entries on the axes carry the factor 2 (the two degenerate sign patterns
    collapse onto one lattice node); a[0, 0] closes the rows so constants are
    annihilated exactly, with the quadrant far-field measure folded in.
    """
    if spec.d != 2 or grid.d != 2:
        raise ValueError("coeffs_2d needs 2D spec and grid")
    _mismatch_check(w.values.shape[0], grid)
    N, h, gam = grid.n_weight, grid.h, spec.gamma
    k = np.arange(N + 1) * h
    R = np.sqrt(k[:, None] ** 2 + k[None, :] ** 2)
    R[0, 0] = 1.0
    a = np.zeros((N + 1, N + 1))
    a[1:, 1:] = w.values[1:, 1:] / R[1:, 1:] ** gam
    a[0, 1:] = 2.0 * w.values[0, 1:] / R[0, 1:] ** gam
    a[1:, 0] = 2.0 * w.values[1:, 0] / R[1:, 0] ** gam
    zeta = spec.zeta
    if zeta:
        w00 = w.values[0, 0]
        for node, fw in _FOLD_2D[w.p]:
            a[0, node] += 2.0 * fw * w00 / R[0, node] ** gam
            a[node, 0] += 2.0 * fw * w00 / R[node, 0] ** gam
    F = farfield_measure_2d(spec.alpha, grid.L, tol, lam=spec.lam)
    a[0, 0] = (-2.0 * (a[0, 1:].sum() + a[1:, 0].sum())
               - 4.0 * a[1:, 1:].sum() - 4.0 * F)
    return StencilCoefficients2D(a=a, zeta=zeta, farfield_measure=F)
