"""Stencil coefficient assembly and the far-field measures."""

import numpy as np
import pytest
from scipy import integrate

from fraclap.fastop import dense_assemble
from fraclap.kernel import Grid, KernelSpec
from fraclap.stencil import (coeffs_1d, coeffs_2d, farfield_measure_1d,
                             farfield_measure_2d)
from fraclap.weights import (weights_1d_analytic, weights_1d_quadrature,
                             weights_2d_quadrature)


def make_1d(alpha, gam, N, p=0, lam=0.0):
    spec = KernelSpec(d=1, alpha=alpha, gamma=gam, lam=lam)
    grid = Grid.make(-1.0, 1.0, N)
    if lam > 0:
        w = weights_1d_quadrature(spec, p, N, grid.h)
    else:
        w = weights_1d_analytic(p, alpha, gam, N, grid.h)
    return spec, grid, w


class TestCoeffs1D:
    def test_no_fold_below_gamma_two(self):
        spec, grid, w = make_1d(1.0, 1.5, 16, p=1)
        c = coeffs_1d(w, spec, grid)
        assert c.zeta == 0
        assert c.a[1] == pytest.approx(w.values[1] / grid.h ** 1.5, rel=1e-14)

    def test_inverse_square_profile(self):
        # gamma = 2, alpha = 1, p = 0: a_j = h/(j h)^2 away from the fold
        spec, grid, w = make_1d(1.0, 2.0, 16, p=0)
        c = coeffs_1d(w, spec, grid)
        j = np.arange(2, 16)
        assert np.allclose(c.a[2:16], 1.0 / (j * j * grid.h), rtol=1e-13)
        # the end node carries the half-width cell
        assert c.a[16] == pytest.approx(0.5 / (16 * 16 * grid.h), rel=1e-13)

    def test_row_sum_identity(self):
        spec, grid, w = make_1d(0.7, 2.0, 32, p=1)
        c = coeffs_1d(w, spec, grid)
        lhs = c.a[0] + 2 * c.a[1:].sum()
        assert lhs == pytest.approx(-2.0 / (0.7 * 2.0 ** 0.7), rel=1e-13)

    def test_diagonal_dominance_p01(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            alpha = rng.uniform(0.1, 1.9)
            gam = rng.uniform(alpha + 0.05, 2.0)
            N = int(rng.integers(8, 64))
            for p in (0, 1):
                spec, grid, w = make_1d(alpha, gam, N, p=p)
                c = coeffs_1d(w, spec, grid)
                assert abs(c.a[0]) > 2 * np.sum(np.abs(c.a[1:]))

    def test_dense_spd_p01(self):
        rng = np.random.default_rng(5)
        for _ in range(6):
            alpha = rng.uniform(0.2, 1.8)
            N = int(rng.integers(8, 65))
            for p in (0, 1):
                spec, grid, w = make_1d(alpha, 2.0, N, p=p)
                c = coeffs_1d(w, spec, grid)
                M = dense_assemble(c, grid, scale=-spec.c)
                assert np.allclose(M, M.T)
                assert np.min(np.linalg.eigvalsh(M)) > 0

    def test_grid_mismatch_rejected(self):
        spec, grid, w = make_1d(1.0, 2.0, 16, p=0)
        other = Grid.make(-1.0, 1.0, 32)
        with pytest.raises(ValueError):
            coeffs_1d(w, spec, other)


class TestFarfield1D:
    def test_power_closed_form(self):
        spec = KernelSpec(d=1, alpha=0.6)
        assert farfield_measure_1d(spec, 2.0) == pytest.approx(
            1.0 / (0.6 * 2.0 ** 0.6), rel=1e-15)

    def test_tempered_vs_quad(self):
        spec = KernelSpec(d=1, alpha=0.9, lam=0.7)
        ref, _ = integrate.quad(lambda s: np.exp(-0.7 * s) * s ** (-1.9), 2.0, np.inf,
                                epsabs=1e-14, epsrel=1e-13)
        assert farfield_measure_1d(spec, 2.0) == pytest.approx(ref, rel=1e-11)


class TestFarfield2D:
    def test_scaling_law(self):
        for alpha in (0.3, 1.0, 1.7):
            v1 = farfield_measure_2d(alpha, 1.0)
            v2 = farfield_measure_2d(alpha, 2.5)
            assert v2 == pytest.approx(2.5 ** (-alpha) * v1, rel=1e-12)

    def test_alpha_one_closed_form(self):
        # 2 * integral of cos over [0, pi/4] = sqrt(2)
        assert farfield_measure_2d(1.0, 1.0) == pytest.approx(np.sqrt(2.0), rel=1e-13)

    def test_strips_plus_quadrant_oracle(self):
        # independent decomposition: two strips and the doubly infinite corner
        alpha = 1.0
        L = 1.0
        kern = lambda y, x: (x * x + y * y) ** (-(2 + alpha) / 2)
        strip, _ = integrate.dblquad(kern, L, np.inf, lambda x: 0.0, lambda x: L,
                                     epsabs=1e-12)
        corner, _ = integrate.dblquad(kern, L, np.inf, lambda x: L, lambda x: np.inf,
                                      epsabs=1e-12)
        ref = 2 * strip + corner
        assert farfield_measure_2d(alpha, L) == pytest.approx(ref, rel=1e-9)

    def test_monotone_in_L(self):
        vals = [farfield_measure_2d(0.8, L) for L in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(vals[:-1], vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            farfield_measure_2d(2.5, 1.0)
        with pytest.raises(ValueError):
            farfield_measure_2d(1.0, -1.0)


class TestCoeffs2D:
    def setup_method(self):
        self.spec = KernelSpec(d=2, alpha=1.0, gamma=2.0)
        self.grid = Grid.make((-1.0, -1.0), (1.0, 1.0), 8)
        self.w = weights_2d_quadrature(self.spec, 1, 8, self.grid.h)
        self.c = coeffs_2d(self.w, self.spec, self.grid)

    def test_symmetry(self):
        assert np.max(np.abs(self.c.a - self.c.a.T)) < 1e-14

    def test_no_fold_below_gamma_two(self):
        spec = KernelSpec(d=2, alpha=1.0, gamma=1.6)
        w = weights_2d_quadrature(spec, 1, 8, self.grid.h)
        c = coeffs_2d(w, spec, self.grid)
        r11 = np.hypot(self.grid.h, self.grid.h)
        assert c.a[1, 1] == pytest.approx(w.values[1, 1] / r11 ** 1.6, rel=1e-13)

    def test_matches_independent_assembly(self):
        # brute-force re-transcription of the per-node coefficient cases
        N, h, gam = 8, self.grid.h, 2.0
        w = self.w.values
        a_ref = np.zeros((N + 1, N + 1))
        for k in range(N + 1):
            for l in range(N + 1):
                if k == 0 and l == 0:
                    continue
                r = np.hypot(k * h, l * h)
                mult = 2.0 if (k == 0 or l == 0) else 1.0
                a_ref[k, l] = mult * w[k, l] / r ** gam
        # gamma = 2 fold: the limit quotient is the average of the two axis
        # neighbors, entering both axis entries once
        a_ref[0, 1] += w[0, 0] / h ** gam
        a_ref[1, 0] += w[0, 0] / h ** gam
        F = farfield_measure_2d(1.0, 2.0)
        a_ref[0, 0] = (-2 * (a_ref[0, 1:].sum() + a_ref[1:, 0].sum())
                       - 4 * a_ref[1:, 1:].sum() - 4 * F)
        assert np.allclose(self.c.a, a_ref, rtol=1e-12, atol=1e-12)

    def test_diagonal_closure_identity(self):
        a = self.c.a
        rhs = (-2 * (a[0, 1:].sum() + a[1:, 0].sum()) - 4 * a[1:, 1:].sum()
               - 4 * self.c.farfield_measure)
        assert a[0, 0] == pytest.approx(rhs, rel=1e-12)
