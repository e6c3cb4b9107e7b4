"""Kernel/problem specification types and the factorized integrand pieces.

The discrete schemes never evaluate `phi`/`mu` directly (they work through
precomputed weight tables); these reference evaluators exist for oracles,
tests, and manufactured right-hand sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np

from .specfun import normalization_constant


@dataclass(frozen=True)
class KernelSpec:
    """Power-law or tempered kernel with splitting parameter.

    d       : spatial dimension, 1 or 2
    alpha   : fractional exponent in (0, 2)
    gamma   : splitting parameter in (alpha, 2]
    lam     : tempering rate >= 0; lam = 0 is the plain power kernel
    c       : normalization constant; defaults to the closed-form value,
              overridable for tempered kernels where it is a free scalar
    """

    d: int
    alpha: float
    gamma: float = 2.0
    lam: float = 0.0
    c: Optional[float] = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.alpha < self.gamma <= 2.0:
            raise ValueError(
                f"gamma must lie in (alpha, 2], got gamma={self.gamma}, alpha={self.alpha}"
            )
        if self.lam < 0.0:
            raise ValueError(f"tempering rate must be >= 0, got {self.lam}")
        if self.c is None:
            object.__setattr__(self, "c", normalization_constant(self.d, self.alpha))

    @property
    def tempered(self) -> bool:
        return self.lam > 0.0

    @property
    def zeta(self) -> int:
        """Near-origin limit switch: floor(gamma/2), i.e. 1 iff gamma == 2."""
        return int(math.floor(self.gamma / 2.0))

    def kernel_factor(self, r):
        """Extra kernel factor K(r); identically 1 for the power kernel."""
        if self.lam == 0.0:
            return np.ones_like(np.asarray(r, dtype=float))
        return np.exp(-self.lam * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Grid:
    """Uniform grid on a box, mesh size set by the first axis.

    The per-axis subdivision counts satisfy N[0] = (b[0]-a[0])/h exactly and,
    for the remaining axes, N[i] is the smallest integer with
    a[i] + N[i]*h >= b[i].
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    N: tuple[int, ...]
    h: float = field(init=False)
    L: float = field(init=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if len(a) != len(b) or not 1 <= len(a) <= 2:
            raise ValueError("grid must be 1D or 2D with matching corner lengths")
        if any(bb <= aa for aa, bb in zip(a, b)):
            raise ValueError("upper corners must exceed lower corners")
        if len(a) == 2 and (b[1] - a[1]) > (b[0] - a[0]) + 1e-12:
            raise ValueError("first axis must be the longest (it fixes h and L)")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        h = (b[0] - a[0]) / self.N[0]
        N = [self.N[0]]
        for aa, bb in zip(a[1:], b[1:]):
            N.append(int(math.ceil((bb - aa) / h - 1e-12)))
        object.__setattr__(self, "N", tuple(N))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "L", max(bb - aa for aa, bb in zip(a, b)))

    @classmethod
    def make(cls, a, b, N1: int) -> "Grid":
        """Grid with N1 subdivisions along the first (longest) axis."""
        a = (a,) if np.isscalar(a) else tuple(a)
        b = (b,) if np.isscalar(b) else tuple(b)
        return cls(a, b, (N1,) * len(a))

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def n_weight(self) -> int:
        """Number of weight-table subdivisions: ceil(L/h), shared by all axes."""
        return int(round(self.L / self.h))

    def axis_nodes(self, axis: int) -> np.ndarray:
        return self.a[axis] + self.h * np.arange(self.N[axis] + 1)

    def interior_nodes(self) -> np.ndarray:
        """Interior nodes; shape (M,) in 1D or (M, 2) lexicographic in 2D."""
        if self.d == 1:
            return self.a[0] + self.h * np.arange(1, self.N[0])
        x = self.a[0] + self.h * np.arange(1, self.N[0])
        y = self.a[1] + self.h * np.arange(1, self.N[1])
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def interior_shape(self) -> tuple[int, ...]:
        return tuple(n - 1 for n in self.N)


@dataclass(frozen=True)
class FieldFn:
    """Callable field with a declared evaluable domain.

    domain = "everywhere" marks boundary data g defined on the whole exterior
    (the caller is responsible for its decay at infinity); "interior" marks a
    solution/right-hand side only meaningful inside the box. `fn` must accept
    numpy arrays (one positional array per coordinate).
    """

    fn: Callable[..., np.ndarray]
    domain: str = "everywhere"
    is_zero: bool = False

    def __post_init__(self):
        if self.domain not in ("everywhere", "interior"):
            raise ValueError(f"unknown domain flag {self.domain!r}")

    def __call__(self, *coords):
        if self.is_zero:
            return np.zeros(np.broadcast(*coords).shape) if coords else 0.0
        return self.fn(*coords)

    @classmethod
    def zero(cls) -> "FieldFn":
        return cls(fn=lambda *c: np.zeros(np.broadcast(*c).shape), is_zero=True)


def mu(spec: KernelSpec, xi) -> np.ndarray:
    """Weight factor |xi|^(gamma - d - alpha), tempered kernels carry exp(-lam |xi|)."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    r = np.sqrt((xi * xi).sum(axis=-1))
    if np.any(r == 0.0):
        raise ValueError("mu is singular at xi = 0")
    out = r ** (spec.gamma - spec.d - spec.alpha) * spec.kernel_factor(r)
    return out if out.size > 1 else float(out[0])


def phi(spec: KernelSpec, u: Callable, x, xi) -> float:
    """Central difference quotient: sign-stencil sum of u minus 2^d u(x), over |xi|^gamma.

    The xi -> 0 limit is deliberately not handled here; the stencil assembly
    owns that rule.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    r = math.sqrt(float((xi * xi).sum()))
    if r == 0.0:
        raise ValueError("phi is defined at xi = 0 only as a limit")
    acc = 0.0
    for signs in product((1.0, -1.0), repeat=spec.d):
        pt = x + np.asarray(signs) * xi
        acc += float(u(*pt))
    acc -= 2.0 ** spec.d * float(u(*x))
    return acc / r ** spec.gamma
