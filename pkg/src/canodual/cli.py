"""Command-line front end.

Examples:
  canodual solve example1 --verify
  canodual solve example4 --perturb 0.001,0.005 --report out.yaml
  canodual contour example1 --out pi.csv --grid 101

Exit codes: 0 solved, 2 solver or input failure, 3 oracle mismatch (--verify).
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .bundled import resolve_problem_path
from .errors import CanodualError, DimensionError
from .oracle import cross_validate
from .perturbation import DEFAULT_MAGNITUDE, default_perturbation, perturb_and_solve
from .problem import QuarticProblem, SolverConfig, read_problem
from .report import solve

EXIT_OK, EXIT_FAIL, EXIT_MISMATCH = 0, 2, 3


def export_contour(p: QuarticProblem, path, grid: int = 101, xlim=(-4.0, 4.0), ylim=(-4.0, 4.0)) -> int:
    """Write ``x1,x2,value`` rows on a grid x grid mesh; returns the row count."""
    if p.n != 2:
        raise DimensionError(f"contour export needs n = 2, got n = {p.n}")
    grid = int(grid)
    if grid < 1:
        raise ValueError("grid must be >= 1")
    xs = np.linspace(xlim[0], xlim[1], grid) if grid > 1 else np.array([float(xlim[0])])
    ys = np.linspace(ylim[0], ylim[1], grid) if grid > 1 else np.array([float(ylim[0])])
    X1, X2 = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X1.ravel(), X2.ravel()])
    vals = kernels.primal_values(*kernels.problem_args(p), pts)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "value"])
        for (a, b), v in zip(pts, vals):
            w.writerow(["%.17g" % a, "%.17g" % b, "%.17g" % v])
    return len(vals)


def _vector(text: str, n: int) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if v.shape != (n,):
        raise DimensionError(f"--perturb needs {n} values, got {v.size}")
    return v


def _add_contour_flags(ap, dest_flag: str, required: bool) -> None:
    ap.add_argument(dest_flag, dest="contour", metavar="PATH", required=required,
                    help="write x1,x2,value rows for n = 2 problems")
    ap.add_argument("--grid", type=int, default=101, help="points per axis (default 101)")
    ap.add_argument("--xmin", type=float, default=-4.0)
    ap.add_argument("--xmax", type=float, default=4.0)
    ap.add_argument("--ymin", type=float, default=-4.0)
    ap.add_argument("--ymax", type=float, default=4.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="canodual", description="Canonical dual solver for double-well quartics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="find and classify critical points")
    s.add_argument("problem", help="problem file, or a bundled name (example1 .. example4)")
    s.add_argument("--verify", action="store_true", help="run the oracle and cross-validate")
    s.add_argument("--perturb", nargs="?", const="random", default=None, metavar="V1,..,VN",
                   help=f"add a linear perturbation to f (bare flag: seeded random, |.|_inf = {DEFAULT_MAGNITUDE:g})")
    s.add_argument("--seed", type=int, default=None, help="RNG seed (default 42)")
    s.add_argument("--tol", type=float, default=None, help="definiteness tolerance (default 1e-9)")
    s.add_argument("--starts", type=int, default=None, help="random Newton starts (default 64*m)")
    s.add_argument("--box", type=float, default=None, help="half-width of the random start box")
    s.add_argument("--report", metavar="PATH", default=None, help="write the structured report ('-' for stdout)")
    _add_contour_flags(s, "--contour", required=False)

    c = sub.add_parser("contour", help="export objective values on a grid")
    c.add_argument("problem")
    _add_contour_flags(c, "--out", required=True)
    return ap


def _run_contour(p: QuarticProblem, args) -> None:
    rows = export_contour(p, args.contour, args.grid, (args.xmin, args.xmax), (args.ymin, args.ymax))
    print(f"wrote {rows} rows to {args.contour}", file=sys.stderr)


def run_solve(args) -> int:
    p = read_problem(resolve_problem_path(args.problem))
    cfg = SolverConfig.for_problem(p, rng_seed=args.seed, definiteness_tol=args.tol,
                                   multistart_count=args.starts, sample_box_halfwidth=args.box)
    if args.perturb is not None:
        f_pert = (default_perturbation(p.n, cfg.rng_seed) if args.perturb == "random"
                  else _vector(args.perturb, p.n))
        report = perturb_and_solve(p, f_pert, cfg)
        target = p.with_f(p.f + f_pert)
    else:
        report = solve(p, cfg)
        target = p
    if not report.pairs and not report.excluded:
        print("error: no dual critical point found", file=sys.stderr)
        return EXIT_FAIL
    code = EXIT_OK
    if args.verify:
        report.oracle_summary = cross_validate(report, target, cfg)
        if not report.oracle_summary["passed"]:
            code = EXIT_MISMATCH
    sys.stdout.write(report.to_text())
    if args.report == "-":
        sys.stdout.write(report.to_yaml())
    elif args.report:
        Path(args.report).write_text(report.to_yaml(), encoding="utf-8")
    if args.contour:
        _run_contour(target, args)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return run_solve(args)
        _run_contour(read_problem(resolve_problem_path(args.problem)), args)
        return EXIT_OK
    except (CanodualError, FileNotFoundError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
