"""Boundary vectors and tail/region integrals against independent oracles."""

import numpy as np
import pytest
from scipy import integrate

from fraclap._quad import QuadratureError
from fraclap.boundary import (boundary_vector_1d, boundary_vector_2d,
                              exterior_region_integral_2d, tail_integral_1d)
from fraclap.kernel import FieldFn, Grid, KernelSpec
from fraclap.stencil import coeffs_1d, coeffs_2d
from fraclap.weights import weights_1d_analytic, weights_2d_quadrature

TAIL_RUNGE = 0.42920367320510338077   # int_1^inf 2/(1+s^2) s^-2 ds


class TestTail1D:
    def test_zero_data(self):
        out = tail_integral_1d(FieldFn.zero(), np.linspace(-1, 1, 5), 2.0, 0.7)
        assert np.all(out == 0.0)

    def test_constant_closed_form(self):
        # including a small alpha, where the power substitution does the work
        ones = lambda s: np.ones_like(s)
        for alpha in (0.2, 0.7, 1.0, 1.9):
            for L in (1.0, 2.0):
                out = tail_integral_1d(ones, np.zeros(3), L, alpha)
                assert out[0] == pytest.approx(2.0 / (alpha * L ** alpha), rel=1e-13)

    def test_runge_oracle(self):
        g = lambda s: 1.0 / (1.0 + s * s)
        out = tail_integral_1d(g, np.zeros(1), 1.0, 1.0, tol=1e-14)
        assert out[0] == pytest.approx(TAIL_RUNGE, rel=1e-13)

    def test_tempered_factor(self):
        g = lambda s: np.ones_like(s)
        ref, _ = integrate.quad(lambda s: 2 * np.exp(-0.5 * s) * s ** (-1.8),
                                2.0, np.inf, epsabs=1e-14, epsrel=1e-13)
        out = tail_integral_1d(g, np.zeros(1), 2.0, 0.8, lam=0.5)
        assert out[0] == pytest.approx(ref, rel=1e-11)

    def test_growing_data_rejected(self):
        g = lambda s: s * s
        with pytest.raises(QuadratureError):
            tail_integral_1d(g, np.zeros(1), 1.0, 1.0)


class TestBoundaryVector1D:
    def setup(self, alpha=1.0, N=32, p=1):
        spec = KernelSpec(d=1, alpha=alpha)
        grid = Grid.make(-1.0, 1.0, N)
        w = weights_1d_analytic(p, alpha, 2.0, N, grid.h)
        return spec, grid, coeffs_1d(w, spec, grid)

    def test_zero_data_gives_zero(self):
        spec, grid, c = self.setup()
        b = boundary_vector_1d(FieldFn.zero(), c, grid, spec)
        assert np.all(b.values == 0.0)

    def test_linearity(self):
        spec, grid, c = self.setup()
        g1 = lambda x: 1.0 / (1.0 + x * x)
        g2 = lambda x: np.exp(-np.abs(x))
        b1 = boundary_vector_1d(g1, c, grid, spec).values
        b2 = boundary_vector_1d(g2, c, grid, spec).values
        b12 = boundary_vector_1d(lambda x: g1(x) + g2(x), c, grid, spec).values
        assert np.allclose(b12, b1 + b2, rtol=1e-12)

    def test_against_direct_transcription(self):
        # independent double-loop transcription of the exterior sums plus a
        # scipy tail, at five sample nodes
        spec, grid, c = self.setup(alpha=1.0, N=32)
        g = lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float) ** 2)
        b = boundary_vector_1d(g, c, grid, spec, tol=1e-13).values
        N, h = 32, grid.h
        x = grid.interior_nodes()
        for i in (1, 7, 16, 25, 31):
            acc = 0.0
            for j in range(N, N + i + 1):          # right exterior lattice
                acc += c.a[j - i] * g(-1.0 + j * h)
            for j in range(i - N, 1):              # left exterior lattice
                acc += c.a[i - j] * g(-1.0 + j * h)
            xi = x[i - 1]
            tail, _ = integrate.quad(
                lambda s: (g(xi - s) + g(xi + s)) * s ** -2, 2.0, np.inf,
                epsabs=1e-13, epsrel=1e-12)
            ref = -spec.c * (acc + tail)
            assert b[i - 1] == pytest.approx(ref, rel=1e-8)

    def test_constant_annihilation_with_interior_ones(self):
        from fraclap.fastop import dense_assemble
        spec, grid, c = self.setup(alpha=0.7, N=24, p=0)
        g1 = lambda x: np.ones_like(np.asarray(x, dtype=float))
        b = boundary_vector_1d(g1, c, grid, spec, tol=1e-13).values
        A = dense_assemble(c, grid, scale=-spec.c)
        resid = A @ np.ones(23) + b
        assert np.max(np.abs(resid)) < 1e-10 * abs(c.a[0])


class TestExteriorRegion2D:
    def test_constant_matches_four_measures(self):
        from fraclap.stencil import farfield_measure_2d
        g = lambda x, y: np.ones_like(x)
        for alpha in (0.2, 1.0, 1.9):
            out = exterior_region_integral_2d(g, np.zeros((1, 1)), np.zeros((1, 1)),
                                              2.0, alpha, tol=1e-12)
            assert out[0, 0] == pytest.approx(4 * farfield_measure_2d(alpha, 2.0),
                                              rel=1e-10)

    def test_gaussian_against_dblquad(self):
        alpha, L = 0.7, 2.0
        x0, y0 = 0.25, -0.5
        g = lambda x, y: np.exp(-(x ** 2 + y ** 2))

        def direct(sx, sy):
            kern = lambda y, x: (np.exp(-((x0 + sx * x) ** 2 + (y0 + sy * y) ** 2))
                                 * (x * x + y * y) ** (-(2 + alpha) / 2))
            strip1, _ = integrate.dblquad(kern, L, 40.0, lambda x: 0.0, lambda x: L,
                                          epsabs=1e-11)
            strip2, _ = integrate.dblquad(kern, 0.0, L, lambda x: L, lambda x: 40.0,
                                          epsabs=1e-11)
            corner, _ = integrate.dblquad(kern, L, 40.0, lambda x: L, lambda x: 40.0,
                                          epsabs=1e-11)
            return strip1 + strip2 + corner

        ref = sum(direct(sx, sy) for sx in (1, -1) for sy in (1, -1))
        out = exterior_region_integral_2d(g, np.array([[x0]]), np.array([[y0]]),
                                          L, alpha, tol=1e-12)
        assert out[0, 0] == pytest.approx(ref, rel=1e-8)


class TestBoundaryVector2D:
    def setup(self, alpha=0.7, N=8):
        spec = KernelSpec(d=2, alpha=alpha)
        grid = Grid.make((-1.0, -1.0), (1.0, 1.0), N)
        w = weights_2d_quadrature(spec, 1, N, grid.h)
        return spec, grid, coeffs_2d(w, spec, grid)

    def test_zero_data(self):
        spec, grid, c = self.setup()
        b = boundary_vector_2d(FieldFn.zero(), c, grid, spec)
        assert np.all(b.values == 0.0)

    def test_constant_annihilation(self):
        from fraclap.fastop import dense_assemble
        spec, grid, c = self.setup(alpha=0.7, N=8)
        ones = lambda x, y: np.ones_like(np.asarray(x, dtype=float))
        b = boundary_vector_2d(ones, c, grid, spec, tol=1e-12).values
        A = dense_assemble(c, grid, scale=-spec.c)
        resid = A @ np.ones(49) + b
        assert np.max(np.abs(resid)) < 1e-8

    def test_against_direct_definition_node(self):
        # one node validated against explicit offset loops + region quadrature
        spec, grid, c = self.setup(alpha=0.7, N=16)
        g = lambda x, y: np.exp(-(np.asarray(x) ** 2 + np.asarray(y) ** 2))
        b = boundary_vector_2d(g, c, grid, spec, tol=1e-12).values
        N, h = 16, grid.h
        i = j = 1
        acc = 0.0
        for k in range(N + 1):
            for l in range(N + 1):
                if k == 0 and l == 0:
                    continue
                pats = {(s1 * k, s2 * l)
                        for s1 in ((1, -1) if k else (1,))
                        for s2 in ((1, -1) if l else (1,))}
                for dk, dl in pats:
                    ii, jj = i + dk, j + dl
                    if 1 <= ii <= N - 1 and 1 <= jj <= N - 1:
                        continue
                    acc += c.a[k, l] * g(-1 + ii * h, -1 + jj * h)
        x0, y0 = -1 + i * h, -1 + j * h
        far = exterior_region_integral_2d(g, np.array([[x0]]), np.array([[y0]]),
                                          grid.L, spec.alpha, tol=1e-12)[0, 0]
        ref = -spec.c * (acc + far)
        idx = (i - 1) * (N - 1) + (j - 1)
        assert b[idx] == pytest.approx(ref, rel=1e-6)
