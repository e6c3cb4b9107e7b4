"""One-shot reproduction of the five reference convergence tables."""

from __future__ import annotations

from pathlib import Path

from .cases import (benchmark_case, compact_case, gaussian_2d_case, runge_case,
                    smooth_compact_case)
from .kernel import KernelSpec
from .plots import convergence_plot, sibling_figure_path
from .studies import emit_csv, operator_error_study, poisson_convergence_study

_H_1D = [1.0 / m for m in (16, 32, 64, 128, 256, 512)]
_H_1D_SHORT = [1.0 / m for m in (16, 32, 64, 128, 256)]
_H_2D = [1.0 / m for m in (4, 8, 16, 32, 64, 128)]
_H_2D_QUICK = [1.0 / m for m in (4, 8, 16, 32, 64)]


def _emit(keyed, out, title, key_name="case"):
    out = Path(out)
    emit_csv([], out, keyed=keyed, key_name=key_name)
    convergence_plot(keyed, sibling_figure_path(out), title=title)


def _print_keyed(keyed):
    for label, rows in keyed.items():
        print(f"# {label}")
        print("h,error_inf,rate")
        for r in rows:
            rate = "" if r.rate is None else f"{r.rate:.4f}"
            print(f"{r.h:.6g},{r.error_inf:.6e},{rate}")


def run_table(number: int, out=None, quick: bool = False) -> int:
    if number == 1:
        keyed = {}
        for alpha in (0.5, 1.0, 1.7):
            case = compact_case(alpha)
            for p in (0, 1, 2):
                spec = KernelSpec(d=1, alpha=alpha)
                keyed[f"alpha={alpha} p={p}"] = operator_error_study(
                    case, spec, p, _H_1D)
        out = out or "table1.csv"
        _emit(keyed, out, "operator error, minimal-smoothness bump")
    elif number == 2:
        keyed = {}
        for alpha in (0.5, 1.0, 1.7):
            case = smooth_compact_case(alpha)
            for p in (0, 1, 2):
                spec = KernelSpec(d=1, alpha=alpha)
                keyed[f"alpha={alpha} p={p}"] = operator_error_study(
                    case, spec, p, _H_1D)
        out = out or "table2.csv"
        _emit(keyed, out, "operator error, smooth bump")
    elif number == 3:
        keyed = {}
        for alpha in (0.5, 1.0, 1.7):
            case = runge_case(alpha)
            for p in (0, 1, 2):
                spec = KernelSpec(d=1, alpha=alpha)
                keyed[f"alpha={alpha} p={p}"] = operator_error_study(
                    case, spec, p, _H_1D_SHORT)
        out = out or "table3.csv"
        _emit(keyed, out, "operator error, globally smooth case")
    elif number == 4:
        keyed = {}
        for alpha in (0.6, 1.0, 1.5):
            case = benchmark_case(alpha)
            for p in (0, 1, 2):
                spec = KernelSpec(d=1, alpha=alpha)
                keyed[f"alpha={alpha} p={p}"] = poisson_convergence_study(
                    case, spec, p, _H_1D)
        out = out or "table4.csv"
        _emit(keyed, out, "Poisson benchmark, f = 1")
    elif number == 5:
        keyed = {}
        hs = _H_2D_QUICK if quick else _H_2D
        for alpha in (0.2, 0.7, 1.0, 1.4, 1.9):
            case = gaussian_2d_case(alpha)
            spec = KernelSpec(d=2, alpha=alpha)
            keyed[f"alpha={alpha}"] = poisson_convergence_study(case, spec, 1, hs)
        out = out or "table5.csv"
        _emit(keyed, out, "2D Poisson, Gaussian data")
    else:
        raise ValueError(f"unknown table {number}")
    _print_keyed(keyed)
    print(f"wrote {out} and {sibling_figure_path(out)}")
    return 0
