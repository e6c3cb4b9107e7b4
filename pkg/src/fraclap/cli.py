"""Benchmark command line: apply/solve/gamma/tempered sweeps and one-shot
reproduction of the reference tables, emitting CSV plus a rendered figure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import tables
from ._quad import QuadratureError
from .cases import APPLY_CASES, SOLVE_CASES
from .kernel import KernelSpec
from .solver import IterationCapError
from .studies import (emit_csv, gamma_sensitivity_study, operator_error_study,
                      poisson_convergence_study, tempered_study)
from .plots import convergence_plot, sibling_figure_path


def parse_h_list(text: str) -> list[float]:
    """Dyadic mesh ranges: '1/16..1/256' expands by halving; single values and
    comma lists also accepted."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo_s, hi_s = part.split("..")
            lo = Fraction(lo_s)
            hi = Fraction(hi_s)
            if hi > lo:
                lo, hi = hi, lo  # allow either order; iterate coarse -> fine
            h = lo
            while h >= hi:
                out.append(float(h))
                h = h / 2
        else:
            out.append(float(Fraction(part)))
    return out


def _load_config(path):
    if sys.version_info >= (3, 11):
        import tomllib as toml
    else:
        import tomli as toml
    with open(path, "rb") as fh:
        return toml.load(fh)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fraclap",
        description="Fractional-Laplacian discretization benchmarks",
    )
    ap.add_argument("--config", type=Path, default=None,
                    help="TOML file with defaults mirroring the flag names; flags win")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--p", type=int, default=1, choices=(0, 1, 2))
        p.add_argument("--gamma", type=float, default=2.0)
        p.add_argument("--h", dest="h_list", type=str, default="1/16..1/256",
                       help="mesh sizes, e.g. '1/16..1/256' or '1/64,1/128'")
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--no-plot", action="store_true",
                       help="skip the figure next to the CSV")

    p_apply = sub.add_parser("apply", help="operator approximation error study")
    common(p_apply)
    p_apply.add_argument("--case", default="runge", choices=sorted(APPLY_CASES))

    p_solve = sub.add_parser("solve", help="Poisson solution error study")
    common(p_solve)
    p_solve.add_argument("--case", default="benchmark", choices=sorted(SOLVE_CASES))
    p_solve.add_argument("--cg-tol", type=float, default=1e-12)

    p_gamma = sub.add_parser("gamma", help="splitting-parameter sensitivity study")
    common(p_gamma)
    p_gamma.add_argument("--gammas", type=str, default=None,
                         help="comma list; default '2,1,1+alpha/2'")

    p_temp = sub.add_parser("tempered", help="tempered-kernel Poisson study")
    common(p_temp)
    p_temp.add_argument("--lambdas", type=str, default="0.5,1")
    p_temp.add_argument("--cg-tol", type=float, default=1e-12)

    p_table = sub.add_parser("table", help="one-shot reference-table reproduction")
    p_table.add_argument("number", type=int, choices=(1, 2, 3, 4, 5))
    p_table.add_argument("--out", type=Path, default=None)
    p_table.add_argument("--quick", action="store_true",
                         help="coarser meshes only (2D table at full depth is minutes)")
    return ap


def _apply_config(args, ap):
    if args.config is None:
        return args
    cfg = _load_config(args.config)
    defaults = {}
    for key, val in cfg.items():
        defaults[key.replace("-", "_")] = val
    # flags win: only fill values the user left at the parser default
    sentinel = build_parser().parse_args([args.command] + (
        [str(args.number)] if args.command == "table" else []))
    for key, val in defaults.items():
        if hasattr(args, key) and getattr(args, key) == getattr(sentinel, key, None):
            setattr(args, key, val)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args = _apply_config(args, ap)
    try:
        return _dispatch(args)
    except (QuadratureError, IterationCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _print_rows(rows, header="h,error_inf,rate,runtime_s"):
    print(header)
    for r in rows:
        rate = "" if r.rate is None else f"{r.rate:.4f}"
        print(f"{r.h:.6g},{r.error_inf:.6e},{rate},{r.runtime_s:.3f}")


def _emit_error_field(case, spec, args, h_fine, out):
    """Pointwise error map of the finest solve, as (x, y, e) triples plus a
    rendered field figure."""
    from .kernel import Grid
    from .solver import PoissonProblem, grid_error_norms, solve_poisson
    from .studies import emit_error_field
    from .plots import error_field_plot

    if case.u_exact is None:
        return
    N = int(round(2.0 / h_fine))
    grid = Grid.make(-1.0, 1.0, N) if case.d == 1 else \
        Grid.make((-1.0, -1.0), (1.0, 1.0), N)
    rep = solve_poisson(PoissonProblem(spec=spec, grid=grid, f=case.f,
                                       g=case.g, p=args.p), cg_tol=args.cg_tol)
    _, field = grid_error_norms(rep.u_h, case.u_exact, grid)
    base = Path(out)
    fcsv = base.with_name(base.stem + "-field.csv")
    emit_error_field(field, grid, fcsv)
    if not args.no_plot:
        error_field_plot(field, grid, fcsv.with_suffix(".png"),
                         title=f"|e_u|, {case.name}, h={h_fine:g}")


def _dispatch(args) -> int:
    if args.command == "table":
        return tables.run_table(args.number, args.out, quick=args.quick)

    h_list = parse_h_list(args.h_list)
    out = args.out or Path(f"{args.command}.csv")
    if args.command == "apply":
        spec = KernelSpec(d=1, alpha=args.alpha, gamma=args.gamma)
        case = APPLY_CASES[args.case](args.alpha)
        rows = operator_error_study(case, spec, args.p, h_list)
        emit_csv(rows, out)
        _print_rows(rows)
        if not args.no_plot:
            convergence_plot({args.case: rows}, sibling_figure_path(out),
                             title=f"apply {args.case}, alpha={args.alpha}, p={args.p}")
    elif args.command == "solve":
        case = SOLVE_CASES[args.case](args.alpha)
        spec = KernelSpec(d=case.d, alpha=args.alpha, gamma=args.gamma)
        rows = poisson_convergence_study(case, spec, args.p, h_list,
                                         cg_tol=args.cg_tol)
        emit_csv(rows, out)
        _print_rows(rows)
        if not args.no_plot:
            convergence_plot({args.case: rows}, sibling_figure_path(out),
                             title=f"solve {args.case}, alpha={args.alpha}, p={args.p}")
        _emit_error_field(case, spec, args, h_list[-1], out)
    elif args.command == "gamma":
        if args.gammas:
            gammas = [float(Fraction(t)) if "/" in t else float(t)
                      for t in args.gammas.split(",")]
        else:
            # default sweep: 2, 1, 1+alpha/2, alpha+eps, keeping gamma > alpha
            gammas = [g for g in (2.0, 1.0, 1 + args.alpha / 2, args.alpha + 0.05)
                      if args.alpha < g <= 2.0]
        keyed = gamma_sensitivity_study(args.alpha, args.p, gammas, h_list)
        emit_csv([], out, keyed=keyed, key_name="gamma")
        for gam, rows in keyed.items():
            print(f"# gamma = {gam}")
            _print_rows(rows)
        if not args.no_plot:
            convergence_plot({f"gamma={g}": rows for g, rows in keyed.items()},
                             sibling_figure_path(out),
                             title=f"gamma study, alpha={args.alpha}, p={args.p}")
    elif args.command == "tempered":
        lams = [float(t) for t in args.lambdas.split(",")]
        keyed = tempered_study(args.alpha, lams, args.p, h_list,
                               cg_tol=args.cg_tol)
        emit_csv([], out, keyed=keyed, key_name="lambda")
        for lam, rows in keyed.items():
            print(f"# lambda = {lam}")
            _print_rows(rows)
        if not args.no_plot:
            convergence_plot({f"lambda={l}": rows for l, rows in keyed.items()},
                             sibling_figure_path(out),
                             title=f"tempered study, alpha={args.alpha}, p={args.p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
