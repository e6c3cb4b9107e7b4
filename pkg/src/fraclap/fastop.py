"""Structured operator application: symmetric Toeplitz and BTTB matvecs via
circulant embedding, dense fallbacks, and the full-lattice correlation used by
boundary assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .kernel import Grid
from .stencil import StencilCoefficients1D, StencilCoefficients2D

DENSE_CAP = 4096


@dataclass
class ToeplitzOperator:
    """Symmetric Toeplitz matrix held as its first column plus the FFT symbol
    of the length-2n circulant embedding (one zero pad entry)."""

    first_col: np.ndarray
    scale: float = 1.0
    symbol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.first_col, dtype=np.float64)
        n = len(c)
        emb = np.concatenate([c, [0.0], c[:0:-1]])
        self.first_col = c
        self.symbol = np.fft.rfft(emb)

    @property
    def n(self) -> int:
        return len(self.first_col)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got {x.shape}")
        y = np.fft.irfft(np.fft.rfft(x, 2 * self.n) * self.symbol, 2 * self.n)
        return self.scale * y[: self.n]

    def dense(self) -> np.ndarray:
        idx = np.abs(np.arange(self.n)[:, None] - np.arange(self.n)[None, :])
        return self.scale * self.first_col[idx]


@dataclass
class BTTBOperator:
    """Symmetric block-Toeplitz-Toeplitz-block matrix from a per-offset
    coefficient table: entry ((i,j),(i',j')) = scale * a[|i-i'|, |j-j'|].

    Vectors are ordered with the first grid index fast, the second slow.
    """

    a_table: np.ndarray          # (>= n1, >= n2) offset coefficients
    n1: int
    n2: int
    scale: float = 1.0
    symbol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.asarray(self.a_table, dtype=np.float64)
        if a.shape[0] < self.n1 or a.shape[1] < self.n2:
            raise ValueError("coefficient table smaller than block structure")
        emb = np.zeros((2 * self.n1, 2 * self.n2))
        idx1 = _wrap_index(self.n1)
        idx2 = _wrap_index(self.n2)
        ok1, ok2 = idx1 >= 0, idx2 >= 0
        emb[np.ix_(ok1, ok2)] = a[np.ix_(idx1[ok1], idx2[ok2])]
        self.symbol = np.fft.rfft2(emb)

    @property
    def shape(self) -> tuple[int, int]:
        m = self.n1 * self.n2
        return (m, m)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n1 * self.n2,):
            raise ValueError(f"expected vector of length {self.n1 * self.n2}")
        X = np.zeros((2 * self.n1, 2 * self.n2))
        X[: self.n1, : self.n2] = x.reshape(self.n1, self.n2)
        Y = np.fft.irfft2(np.fft.rfft2(X) * self.symbol, s=(2 * self.n1, 2 * self.n2))
        return self.scale * Y[: self.n1, : self.n2].ravel()

    def dense(self) -> np.ndarray:
        i = np.arange(self.n1)
        j = np.arange(self.n2)
        di = np.abs(i[:, None] - i[None, :])
        dj = np.abs(j[:, None] - j[None, :])
        M = self.a_table[di[:, None, :, None], dj[None, :, None, :]]
        m = self.n1 * self.n2
        return self.scale * M.reshape(m, m)


def _wrap_index(n: int) -> np.ndarray:
    """Circulant index map of length 2n: [0..n-1, pad, n-1..1] with -1 at the pad."""
    idx = np.empty(2 * n, dtype=int)
    idx[:n] = np.arange(n)
    idx[n] = -1
    idx[n + 1:] = np.arange(n - 1, 0, -1)
    return idx


def operator_1d(coeffs: StencilCoefficients1D, grid: Grid, scale: float) -> ToeplitzOperator:
    """Interior differentiation matrix: (N-1) x (N-1) symmetric Toeplitz."""
    M = grid.N[0] - 1
    return ToeplitzOperator(first_col=coeffs.a[:M], scale=scale)


def operator_2d(coeffs: StencilCoefficients2D, grid: Grid, scale: float) -> BTTBOperator:
    return BTTBOperator(a_table=coeffs.a, n1=grid.N[0] - 1, n2=grid.N[1] - 1,
                        scale=scale)


def dense_assemble(coeffs, grid: Grid, scale: float) -> np.ndarray:
    """Explicit interior matrix for validation; refuses sizes above DENSE_CAP."""
    m = int(np.prod(grid.interior_shape()))
    if m > DENSE_CAP:
        raise ValueError(f"dense assembly capped at {DENSE_CAP} unknowns, need {m}")
    if isinstance(coeffs, StencilCoefficients1D):
        return operator_1d(coeffs, grid, scale).dense()
    return operator_2d(coeffs, grid, scale).dense()


def lattice_correlate(a_table: np.ndarray, u_ext: np.ndarray) -> np.ndarray:
    """Correlate an extended lattice field with the symmetric offset table.

    a_table holds coefficients for offsets 0..N per axis; u_ext must cover
    every interior node plus an N-halo per axis. Returns, for each interior
    node, sum over offsets delta of a[|delta|] * u_ext[node + delta], computed
    with an FFT convolution (the mirrored kernel is symmetric).
    """
    if u_ext.ndim == 1:
        kern = np.concatenate([a_table[:0:-1], a_table])
        return fftconvolve(u_ext, kern, mode="valid")
    N = a_table.shape[0] - 1
    full = np.zeros((2 * N + 1, 2 * N + 1))
    full[N:, N:] = a_table
    full[N:, :N] = a_table[:, :0:-1]
    full[:N, N:] = a_table[:0:-1, :]
    full[:N, :N] = a_table[:0:-1, :0:-1]
    return fftconvolve(u_ext, full, mode="valid")
