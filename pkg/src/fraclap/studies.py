"""Convergence-study harness: operator-error and Poisson sweeps, splitting
and tempering sensitivity studies, CSV emission.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cases import TestCase, runge_case, tempered_case
from .kernel import Grid, KernelSpec
from .solver import PoissonProblem, apply_operator, grid_error_norms, solve_poisson


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    error_inf: float
    rate: Optional[float]        # None on the first row
    runtime_s: float
    probes: dict = field(default_factory=dict)


def rate_of(coarse_err: float, fine_err: float) -> float:
    """Observed order between successive mesh halvings: log2(e(2h)/e(h))."""
    return math.log2(coarse_err / fine_err)


def attach_rates(rows: list[ConvergenceRow]) -> list[ConvergenceRow]:
    out = []
    for prev, row in zip([None] + rows[:-1], rows):
        r = None if prev is None else rate_of(prev.error_inf, row.error_inf)
        out.append(ConvergenceRow(h=row.h, error_inf=row.error_inf, rate=r,
                                  runtime_s=row.runtime_s, probes=row.probes))
    return out


def max_workers() -> int:
    env = os.environ.get("FRACLAP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parallel(fn, args_list):
    """Run a sweep in input order, honoring the FRACLAP_THREADS cap."""
    workers = min(max_workers(), max(1, len(args_list)))
    if workers == 1:
        return [fn(a) for a in args_list]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, args_list))


def _interval(case: TestCase) -> tuple[float, float]:
    return (-1.0, 1.0)


def operator_error_study(case: TestCase, spec: KernelSpec, p: int,
                         h_list: Sequence[float],
                         probe_points: Sequence[float] = (),
                         dtype=np.longdouble) -> list[ConvergenceRow]:
    """Max-norm operator error per mesh, with optional pointwise probes.

    Runs the grouped-difference application in extended precision by default
    so errors down to ~1e-13 stay resolvable.
    """
    if case.exact_operator is None:
        raise ValueError(f"case {case.name} has no exact operator values")
    a, b = _interval(case)

    def one(h: float) -> ConvergenceRow:
        t0 = time.perf_counter()
        grid = Grid.make(a, b, int(round((b - a) / h)))
        y = apply_operator(spec, grid, p, case.u_exact, case.g, dtype=dtype)
        x = grid.interior_nodes()
        fex = np.asarray(case.exact_operator(x), dtype=np.float64)
        e = np.abs(np.asarray(y, dtype=np.float64) - fex)
        probes = {}
        for xp in probe_points:
            i = int(np.argmin(np.abs(x - xp)))
            if abs(x[i] - xp) < grid.h / 4:
                probes[xp] = float(e[i])
        return ConvergenceRow(h=h, error_inf=float(e.max()), rate=None,
                              runtime_s=time.perf_counter() - t0, probes=probes)

    return attach_rates(_parallel(one, list(h_list)))


def poisson_convergence_study(case: TestCase, spec: KernelSpec, p: int,
                              h_list: Sequence[float],
                              cg_tol: float = 1e-12,
                              probe_points: Sequence[float] = (),
                              defect_mode: bool = False) -> list[ConvergenceRow]:
    """Solution error per mesh for a Poisson test case with known u.

    defect_mode solves for the error directly: the consistency defect
    f - L u_exact is formed by the extended-precision operator application
    and fed through the same linear solve, which is algebraically identical
    but keeps matvec roundoff proportional to the error instead of the
    solution (needed to resolve errors below ~1e-9 on fine meshes).
    """
    if case.u_exact is None:
        raise ValueError(f"case {case.name} has no exact solution")
    a, b = _interval(case)

    def one(h: float) -> ConvergenceRow:
        t0 = time.perf_counter()
        if case.d == 1:
            grid = Grid.make(a, b, int(round((b - a) / h)))
        else:
            grid = Grid.make((a, a), (b, b), int(round((b - a) / h)))
        problem = PoissonProblem(spec=spec, grid=grid, f=case.f, g=case.g, p=p)
        if defect_mode:
            err, e_field = _defect_solve(problem, case, cg_tol)
        else:
            report = solve_poisson(problem, cg_tol=cg_tol)
            err, e_field = grid_error_norms(report.u_h, case.u_exact, grid)
        probes = {}
        if case.d == 1:
            x = grid.interior_nodes()
            for xp in probe_points:
                i = int(np.argmin(np.abs(x - xp)))
                if abs(x[i] - xp) < grid.h / 4:
                    probes[xp] = float(abs(e_field[i]))
        return ConvergenceRow(h=h, error_inf=err, rate=None,
                              runtime_s=time.perf_counter() - t0, probes=probes)

    return attach_rates(_parallel(one, list(h_list)))


def _defect_solve(problem: PoissonProblem, case: TestCase, cg_tol: float):
    """Error field of the discrete solution via the defect formulation."""
    from .fastop import operator_1d, operator_2d
    from .solver import _cg, apply_operator, build_coeffs

    spec, grid, p = problem.spec, problem.grid, problem.p
    Lu = apply_operator(spec, grid, p, case.u_exact, case.g, dtype=np.longdouble)
    pts = grid.interior_nodes()
    fvals = case.f(pts) if grid.d == 1 else case.f(pts[:, 0], pts[:, 1])
    tau = np.asarray(fvals, dtype=np.float64) - np.asarray(Lu, dtype=np.float64)
    coeffs = build_coeffs(spec, p, grid)
    op = operator_1d(coeffs, grid, -spec.c) if grid.d == 1 else \
        operator_2d(coeffs, grid, -spec.c)
    e, _, _, _ = _cg(op.matvec, tau, cg_tol, 20000)
    return float(np.max(np.abs(e))), e


def gamma_sensitivity_study(alpha: float, p: int, gamma_list: Sequence[float],
                            h_list: Sequence[float],
                            dtype=np.longdouble) -> dict[float, list[ConvergenceRow]]:
    """Operator-error sweeps of the globally smooth case, one per splitting
    parameter; gamma <= alpha is rejected by the kernel spec."""
    case = runge_case(alpha)
    out = {}
    for gam in gamma_list:
        spec = KernelSpec(d=1, alpha=alpha, gamma=float(gam))
        out[float(gam)] = operator_error_study(case, spec, p, h_list, dtype=dtype)
    return out


def tempered_study(alpha: float, lam_list: Sequence[float], p: int,
                   h_list: Sequence[float], cg_tol: float = 1e-12,
                   f_tol: float = 1e-12) -> dict[float, list[ConvergenceRow]]:
    """Tempered Poisson sweeps; the right-hand side is manufactured per mesh
    by the direct-definition quadrature at tolerance f_tol."""
    out = {}
    for lam in lam_list:
        rows = []
        for h in h_list:
            t0 = time.perf_counter()
            N = int(round(2.0 / h))
            grid = Grid.make(-1.0, 1.0, N)
            spec = KernelSpec(d=1, alpha=alpha, gamma=2.0, lam=float(lam))
            case = tempered_case(spec, grid.interior_nodes(), grid.h, f_tol)
            problem = PoissonProblem(spec=spec, grid=grid, f=case.f, g=case.g, p=p)
            report = solve_poisson(problem, cg_tol=cg_tol)
            err, _ = grid_error_norms(report.u_h, case.u_exact, grid)
            rows.append(ConvergenceRow(h=h, error_inf=err, rate=None,
                                       runtime_s=time.perf_counter() - t0))
        out[float(lam)] = attach_rates(rows)
    return out


# --- CSV emission ---------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(rows: list[ConvergenceRow], path, keyed: Optional[dict] = None,
             key_name: str = "gamma"):
    """Write study rows as CSV; shortest round-trip decimals, deterministic bytes.

    With `keyed`, writes a keyed table (gamma/lambda studies) with schema
    `<key_name>,h,error_inf,rate`; otherwise `h,error_inf,rate,runtime_s`.
    """
    lines = []
    if keyed is None:
        lines.append("h,error_inf,rate,runtime_s")
        for r in rows:
            lines.append(",".join([_fmt(r.h), _fmt(r.error_inf), _fmt(r.rate),
                                   _fmt(r.runtime_s)]))
    else:
        lines.append(f"{key_name},h,error_inf,rate")
        for key in keyed:
            label = _fmt(key) if isinstance(key, float) else str(key)
            if "," in label:
                raise ValueError(f"keyed CSV label may not contain commas: {label!r}")
            for r in keyed[key]:
                lines.append(",".join([label, _fmt(r.h),
                                       _fmt(r.error_inf), _fmt(r.rate)]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_error_field(pointwise: np.ndarray, grid: Grid, path):
    """Pointwise error field as (x, y, e) triples (y empty in 1D)."""
    pts = grid.interior_nodes()
    lines = ["x,y,e"]
    if grid.d == 1:
        for x, e in zip(pts, np.asarray(pointwise).ravel()):
            lines.append(f"{_fmt(float(x))},,{_fmt(float(e))}")
    else:
        for (x, y), e in zip(pts, np.asarray(pointwise).ravel()):
            lines.append(f"{_fmt(float(x))},{_fmt(float(y))},{_fmt(float(e))}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
