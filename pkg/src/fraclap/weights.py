"""Weight integrals of the Lagrange bases against the singular kernel factor.

1D tables for the power kernel come from closed forms; everything else is
singularity-aware quadrature: plain Gauss-Legendre on half-cells away from the
origin, and exact monomial moments (polar moments in 2D) on the cell touching
it, so the tables are accurate to near machine precision for any admissible
gamma - alpha.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ._quad import gl_panel, power_moment
from .kernel import KernelSpec

GL_ORDER = 16

_cache_1d: dict = {}
_cache_2d: dict = {}


@dataclass(frozen=True)
class WeightTable1D:
    p: int
    values: np.ndarray           # omega[0..N]
    sigma: tuple[float, float, float]
    provenance: str              # "analytic" or "quadrature(tol)"

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite weight encountered")


@dataclass(frozen=True)
class WeightTable2D:
    p: int
    values: np.ndarray           # omega[0..N, 0..N]
    tol: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite weight encountered")


def _check_params(p: int, alpha: float, gamma: float, N: int):
    if p not in (0, 1, 2):
        raise ValueError(f"basis degree must be 0, 1 or 2, got {p}")
    if gamma <= alpha:
        raise ValueError(
            f"gamma must exceed alpha (gamma={gamma}, alpha={alpha}): "
            "the near-origin weight integral diverges otherwise"
        )
    if p == 2:
        if N % 2 != 0:
            raise ValueError("quadratic basis needs an even number of cells")
        if N < 4:
            raise ValueError("quadratic basis needs N >= 4")


# closed-form interior expressions cancel like k^2 at large offsets; beyond
# this index the translation-invariant profile quadrature is exact to roundoff
PROFILE_CUT = 64

_profile_cache: dict = {}


def _interior_profile(p: int, parity: int, dtype):
    """Quadrature nodes (offsets in units of h) and weights, basis folded in,
    for one interior basis function centered at 0."""
    key = (p, parity, np.dtype(dtype).name)
    if key in _profile_cache:
        return _profile_cache[key]
    if p == 0:
        pieces = [(-0.5, 0.0, lambda t: np.ones_like(t)),
                  (0.0, 0.5, lambda t: np.ones_like(t))]
    elif p == 1:
        pieces = [(a, a + 0.5, lambda t: 1 - np.abs(t))
                  for a in (-1.0, -0.5, 0.0, 0.5)]
    elif parity == 1:  # quadratic bump at an element midpoint
        pieces = [(a, a + 0.5, lambda t: 1 - t * t)
                  for a in (-1.0, -0.5, 0.0, 0.5)]
    else:              # quadratic at a shared element endpoint
        left = lambda t: (t + 2) * (t + 1) / 2
        right = lambda t: (t - 1) * (t - 2) / 2
        pieces = [(a, a + 0.5, left) for a in (-2.0, -1.5, -1.0, -0.5)] + \
                 [(a, a + 0.5, right) for a in (0.0, 0.5, 1.0, 1.5)]
    ts, ws = [], []
    for a, b, f in pieces:
        t, wq = gl_panel(GL_ORDER, a, b, dtype)
        ts.append(t)
        ws.append(wq * f(t))
    out = (np.concatenate(ts), np.concatenate(ws))
    _profile_cache[key] = out
    return out


def _interior_weights_by_profile(p: int, ks: np.ndarray, s0, h, dtype):
    """omega_k = h * sum_q W_q (xi_k + t_q h)^(s0-1) for interior k."""
    out = np.empty(len(ks), dtype=dtype)
    classes = [(ks % 2 == 1, 1), (ks % 2 == 0, 0)] if p == 2 else [(slice(None), 0)]
    for sel, parity in classes:
        sub = ks[sel]
        if len(np.atleast_1d(sub)) == 0:
            continue
        tq, Wq = _interior_profile(p, parity, dtype)
        vals = (sub[:, None] * h + tq[None, :] * h) ** (s0 - 1)
        out[sel] = h * (vals @ Wq)
    return out


def weights_1d_analytic(p: int, alpha: float, gamma: float, N: int, h: float,
                        dtype=np.float64) -> WeightTable1D:
    """Closed-form 1D weights for the power kernel.

    All entries are exact integrals of the degree-p basis against
    xi^(gamma-1-alpha); the quadratic case distinguishes element midpoints
    (odd k) from element endpoints (even k). Interior entries beyond
    PROFILE_CUT use the cancellation-free profile quadrature, which agrees
    with the closed forms to roundoff.
    """
    _check_params(p, alpha, gamma, N)
    s0 = dtype(gamma) - dtype(alpha)
    s1, s2 = s0 + 1, s0 + 2
    h = dtype(h)
    xi = np.arange(N + 1, dtype=dtype) * h
    w = np.zeros(N + 1, dtype=dtype)
    if p == 0:
        w[0] = (h / 2) ** s0 / s0
        w[1:N] = ((xi[1:N] + h / 2) ** s0 - (xi[1:N] - h / 2) ** s0) / s0
        w[N] = (xi[N] ** s0 - (xi[N] - h / 2) ** s0) / s0
    elif p == 1:
        pre = 1 / (h * s1 * s0)
        w[0] = pre * h ** s1
        w[1:N] = pre * (xi[2:] ** s1 + xi[: N - 1] ** s1 - 2 * xi[1:N] ** s1)
        w[N] = pre * (xi[N - 1] ** s1 - xi[N] ** s1 + s1 * h * xi[N] ** s0)
    else:
        pre = 1 / (2 * h * h)
        w[0] = pre * (xi[2] ** s2 / s2 - xi[3] * xi[2] ** s1 / s1
                      + 2 * h * h * xi[2] ** s0 / s0)
        ks = np.arange(1, N)
        ko, ke = ks[ks % 2 == 1], ks[ks % 2 == 0]
        w[ko] = pre * (-2 * (xi[ko + 1] ** s2 - xi[ko - 1] ** s2) / s2
                       + 4 * xi[ko] * (xi[ko + 1] ** s1 - xi[ko - 1] ** s1) / s1
                       - 2 * xi[ko + 1] * xi[ko - 1] * (xi[ko + 1] ** s0 - xi[ko - 1] ** s0) / s0)
        w[ke] = pre * ((xi[ke + 2] ** s2 - xi[ke - 2] ** s2) / s2
                       - ((xi[ke - 2] + xi[ke - 1]) * (xi[ke] ** s1 - xi[ke - 2] ** s1)
                          + (xi[ke + 1] + xi[ke + 2]) * (xi[ke + 2] ** s1 - xi[ke] ** s1)) / s1
                       + (xi[ke - 2] * xi[ke - 1] * (xi[ke] ** s0 - xi[ke - 2] ** s0)
                          + xi[ke + 2] * xi[ke + 1] * (xi[ke + 2] ** s0 - xi[ke] ** s0)) / s0)
        w[N] = pre * ((xi[N] ** s2 - xi[N - 2] ** s2) / s2
                      - (xi[N - 2] + xi[N - 1]) * (xi[N] ** s1 - xi[N - 2] ** s1) / s1
                      + xi[N - 1] * xi[N - 2] * (xi[N] ** s0 - xi[N - 2] ** s0) / s0)
    if N - 1 >= PROFILE_CUT:
        ks = np.arange(PROFILE_CUT, N)
        w[ks] = _interior_weights_by_profile(p, ks, s0, h, dtype)
    return WeightTable1D(p=p, values=w, sigma=(float(s0), float(s1), float(s2)),
                         provenance="analytic")


# --- basis bookkeeping on half-cells -----------------------------------------
#
# Every basis function of degree p is a single polynomial on each half-cell
# [j*h/2, (j+1)*h/2]; this keeps one uniform integration path for all p.

def _active_basis(p: int, j: int, N: int) -> list[int]:
    """Basis indices supported on half-cell j (of 2N)."""
    if p == 0:
        k = (j + 1) // 2
        return [k] if k <= N else []
    if p == 1:
        k = j // 2
        return [k, k + 1]
    e = j // 4  # quadratic element index
    base = 2 * e
    return [k for k in (base, base + 1, base + 2) if k <= N]


def _basis_poly_coeffs(p: int, k: int, j: int, h: float, N: int) -> np.ndarray:
    """Monomial coefficients (in xi) of basis k restricted to half-cell j."""
    if p == 0:
        return np.array([1.0])
    if p == 1:
        xk = k * h
        if j // 2 == k - 1:      # rising flank
            return np.array([-(xk - h) / h, 1.0 / h])
        return np.array([(xk + h) / h, -1.0 / h])
    # p == 2: quadratic Lagrange on the element containing half-cell j
    e = j // 4
    nodes = (2 * e) * h, (2 * e + 1) * h, (2 * e + 2) * h
    others = [n for n in nodes if abs(n - k * h) > h / 4]
    x1, x2 = others
    denom = (k * h - x1) * (k * h - x2)
    # (xi - x1)(xi - x2)/denom
    return np.array([x1 * x2 / denom, -(x1 + x2) / denom, 1.0 / denom])


def _basis_values(p: int, k: int, j: int, h: float, N: int, xi: np.ndarray) -> np.ndarray:
    c = _basis_poly_coeffs(p, k, j, h, N)
    out = np.zeros_like(xi)
    for m, cm in enumerate(c):
        out += cm * xi ** m
    return out


def weights_1d_quadrature(spec: KernelSpec, p: int, N: int, h: float,
                          tol: float = 1e-12) -> WeightTable1D:
    """1D weights by quadrature, for arbitrary (power or tempered) kernels.

    Non-singular half-cells use order-16 Gauss-Legendre. On the half-cell
    touching xi = 0 the integrand's polynomial factor is expanded and each
    monomial moment against exp(-lam*xi) * xi^(sigma0-1) is evaluated in
    closed form, which is exact to roundoff for any sigma0 > 0.
    """
    if spec.d != 1:
        raise ValueError("weights_1d_quadrature needs a 1D kernel spec")
    alpha, gamma, lam = spec.alpha, spec.gamma, spec.lam
    _check_params(p, alpha, gamma, N)
    key = (p, alpha, gamma, lam, N, h, tol)
    if key in _cache_1d:
        return _cache_1d[key]
    s0 = gamma - alpha
    h2 = h / 2.0
    w = np.zeros(N + 1)
    for j in range(2 * N):
        lo, hi = j * h2, (j + 1) * h2
        active = _active_basis(p, j, N)
        if j == 0:
            for k in active:
                c = _basis_poly_coeffs(p, k, j, h, N)
                mom = power_moment(s0 - 1 + np.arange(len(c)), hi, lam)
                w[k] += float(c @ mom)
            continue
        xq, wq = gl_panel(GL_ORDER, lo, hi)
        ker = wq * xq ** (s0 - 1)
        if lam > 0.0:
            ker = ker * np.exp(-lam * xq)
        for k in active:
            w[k] += float(_basis_values(p, k, j, h, N, xq) @ ker)
    table = WeightTable1D(p=p, values=w, sigma=(s0, s0 + 1, s0 + 2),
                          provenance=f"quadrature({tol:g})")
    _cache_1d[key] = table
    return table


def weights_2d_quadrature(spec: KernelSpec, p: int, N: int, h: float,
                          tol: float = 1e-12) -> WeightTable2D:
    """2D tensor-basis weights against K(|xi|) |xi|^(gamma-2-alpha) on [0, L]^2.

    Cell pairs away from the origin use tensor Gauss-Legendre of order 16.
    The corner half-cell pair [0, h/2]^2 is integrated exactly: the tensor
    polynomial is expanded into monomials and each monomial's radial moment
    over the two polar wedges of the square is a closed-form incomplete-gamma
    integral, with order-48 Gauss-Legendre in the angle.
    """
    if spec.d != 2:
        raise ValueError("weights_2d_quadrature needs a 2D kernel spec")
    alpha, gamma, lam = spec.alpha, spec.gamma, spec.lam
    _check_params(p, alpha, gamma, N)
    key = (p, alpha, gamma, lam, N, h, tol)
    if key in _cache_2d:
        return _cache_2d[key]
    sE = gamma - 2.0 - alpha       # exponent of |xi|
    h2 = h / 2.0
    nhc = 2 * N

    # per-half-cell quadrature nodes and basis values
    tq, twq = gl_panel(GL_ORDER, 0.0, 1.0)
    xi_at = (np.arange(nhc)[:, None] + tq[None, :]) * h2          # (nhc, q)
    active = [_active_basis(p, j, N) for j in range(nhc)]
    nact = max(len(a) for a in active)
    B = np.zeros((nhc, nact, GL_ORDER))
    act_idx = np.full((nhc, nact), -1, dtype=int)
    for j in range(nhc):
        for i, k in enumerate(active[j]):
            B[j, i] = _basis_values(p, k, j, h, N, xi_at[j])
            act_idx[j, i] = k

    w = np.zeros((N + 1, N + 1))
    scale = h2 * twq
    for ja in range(nhc):
        xa = xi_at[ja]
        # kernel tensor over all partner half-cells at once: (nhc, q, q)
        R = np.sqrt(xa[None, :, None] ** 2 + xi_at[:, None, :] ** 2)
        ker = R ** sE
        if lam > 0.0:
            ker *= np.exp(-lam * R)
        M = ker * (scale[None, :, None] * scale[None, None, :])
        if ja == 0:
            M[0] = 0.0  # origin pair handled exactly below
        C = np.einsum("iq,bjr,bqr->bij", B[ja], B, M)
        for i, k in enumerate(act_idx[ja]):
            if k < 0:
                continue
            for jj in range(nact):
                ls = act_idx[:, jj]
                ok = ls >= 0
                np.add.at(w[k], ls[ok], C[ok, i, jj])

    _add_origin_pair_exact(w, p, h, N, sE, lam)
    table = WeightTable2D(p=p, values=w, tol=tol)
    _cache_2d[key] = table
    return table


def _add_origin_pair_exact(w: np.ndarray, p: int, h: float, N: int,
                           sE: float, lam: float, n_theta: int = 48):
    """Exact contribution of the half-cell pair [0, h/2]^2 via polar moments."""
    h2 = h / 2.0
    thq, thw = gl_panel(n_theta, 0.0, np.pi / 4.0)
    cth, sth = np.cos(thq), np.sin(thq)
    Rth = h2 / cth
    ks = _active_basis(p, 0, N)
    coeffs = [_basis_poly_coeffs(p, k, 0, h, N) for k in ks]
    deg = max(len(c) for c in coeffs)
    # radial moments per total monomial degree: int_0^R r^(sE+1+m+n) K(r) dr
    mom = {mn: power_moment(sE + 1 + mn, Rth, lam) for mn in range(2 * deg - 1)}
    for i, k in enumerate(ks):
        for j, l in enumerate(ks):
            tot = 0.0
            for m, cm in enumerate(coeffs[i]):
                for n, cn in enumerate(coeffs[j]):
                    c = cm * cn
                    if c == 0.0:
                        continue
                    ang = cth ** m * sth ** n + sth ** m * cth ** n
                    tot += c * float(thw @ (ang * mom[m + n]))
            w[k, l] += tot


# --- binary cache files -------------------------------------------------------

_MAGIC = b"FRWT"


def save_table(path, spec: KernelSpec, p: int, N: int, h: float,
               table: "WeightTable1D | WeightTable2D"):
    """Dump a weight table: little-endian header (d, p, alpha, gamma, lam, N, h)
    then the raw float64 value array; reload is bit-exact."""
    vals = np.ascontiguousarray(table.values, dtype="<f8")
    header = struct.pack(
        "<4sQQdddQd", _MAGIC, spec.d, p, spec.alpha, spec.gamma, spec.lam, N, h
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(vals.tobytes())


def load_table(path, spec: KernelSpec, p: int, N: int, h: float):
    """Reload a table saved by save_table, validating every header field."""
    with open(path, "rb") as f:
        raw = f.read()
    hdr_size = struct.calcsize("<4sQQdddQd")
    magic, d, p_, alpha, gamma, lam, N_, h_ = struct.unpack("<4sQQdddQd", raw[:hdr_size])
    if magic != _MAGIC:
        raise ValueError("not a weight-table cache file")
    if (d, p_, N_) != (spec.d, p, N) or (alpha, gamma, lam) != (spec.alpha, spec.gamma, spec.lam) or h_ != h:
        raise ValueError("cache header does not match the requested table")
    vals = np.frombuffer(raw[hdr_size:], dtype="<f8").copy()
    if d == 1:
        if vals.size != N + 1:
            raise ValueError("corrupt cache payload")
        return WeightTable1D(p=p, values=vals,
                             sigma=(gamma - alpha, gamma - alpha + 1, gamma - alpha + 2),
                             provenance="cache")
    if vals.size != (N + 1) ** 2:
        raise ValueError("corrupt cache payload")
    return WeightTable2D(p=p, values=vals.reshape(N + 1, N + 1), tol=float("nan"))
