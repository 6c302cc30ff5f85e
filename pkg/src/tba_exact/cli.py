"""Command-line front end: solve, verify, relations, index, dump.

Exit codes: 0 success, 1 usage error, 2 solver failure, 3 verification failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import indices, relations, tba_solver
from .closedform import ModelKind, ModelSpec
from .tba_solver import ThetaGrid

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3
CSV_TAG = "# tba-exact v1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    grid: ThetaGrid
    damping: float
    tol: float
    seed: int
    output_path: str | None
    format: str


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_csv(stream, theta, columns: dict):
    """CSV with a versioned header comment; complex columns are split into _re/_im."""
    names, data = [], []
    for name, vals in columns.items():
        vals = np.asarray(vals)
        if np.iscomplexobj(vals) and np.any(vals.imag != 0):
            names += [f"{name}_re", f"{name}_im"]
            data += [vals.real, vals.imag]
        else:
            names.append(name)
            data.append(np.real(vals))
    stream.write(f"{CSV_TAG} theta,{','.join(names)}\n")
    stream.write(f"theta,{','.join(names)}\n")
    for i, th in enumerate(theta):
        stream.write(",".join([_fmt(th)] + [_fmt(col[i]) for col in data]) + "\n")


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _threads():
    value = os.environ.get("TBA_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise UsageError("TBA_THREADS must be a positive integer") from None
    if n < 1:
        raise UsageError("TBA_THREADS must be a positive integer")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


# ---------------------------------------------------------------- config

def _model(args) -> ModelSpec:
    if args.model == "su3":
        return ModelSpec.su3()
    if args.k is None:
        raise UsageError("--k is required for --model su2k")
    if not math.isfinite(args.k) or args.k < 0:
        raise UsageError(f"k must satisfy k >= 0 (got {args.k:g})")
    return ModelSpec.su2k(args.k)


def build_config(args) -> RunConfig:
    model = _model(args) if hasattr(args, "model") else None
    grid = None
    if hasattr(args, "theta_min"):
        try:
            grid = ThetaGrid(args.theta_min, args.theta_max, args.step)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    damping = getattr(args, "damping", 0.5)
    if not 0.0 < damping <= 1.0:
        raise UsageError("damping must lie in (0, 1]")
    tol = getattr(args, "tol", 1e-11)
    if not tol > 0:
        raise UsageError("tol must be positive")
    return RunConfig(model, grid, damping, tol, getattr(args, "seed", 42),
                     getattr(args, "out", None), getattr(args, "format", "csv"))


# ---------------------------------------------------------------- commands

def _solution_columns(model, fns):
    if model.kind == ModelKind.SU2K:
        A, B, report = fns
        return {"A": A.values.real, "B": B.values.real}, report
    A1, A2, B0, B0b, report = fns
    return {"A1": A1.values, "A2": A2.values, "B0": B0.values, "B0bar": B0b.values}, report


def cmd_solve(cfg: RunConfig, max_iter: int = 5000) -> int:
    if cfg.tol < 1e-12:
        raise UsageError("solve requires tol >= 1e-12")
    try:
        if cfg.model.kind == ModelKind.SU2K:
            out = tba_solver.solve_su2k(cfg.model.k, cfg.grid, cfg.damping, cfg.tol, max_iter)
        else:
            out = tba_solver.solve_su3(cfg.grid, cfg.damping, cfg.tol, max_iter)
    except (tba_solver.SolverError, tba_solver.BranchJumpError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    cols, report = _solution_columns(cfg.model, out)
    base = cfg.output_path or "tba_solution"
    root = base[:-4] if base.endswith(".csv") else base
    with open(root + ".csv", "w", encoding="utf-8") as fh:
        write_csv(fh, cfg.grid.points, cols)
    with open(root + ".json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK if report.converged else EXIT_SOLVER


def cmd_verify(cfg: RunConfig, window=(-10.0, 3.0)) -> int:
    cand = tba_solver.closed_form_candidate(cfg.model, cfg.grid)
    res = tba_solver.residual(cfg.model, cand)
    mask = cfg.grid.window(*window)
    sups = {name: r.sup(mask) for name, r in res.items()}
    ok = all(v < cfg.tol for v in sups.values())
    if cfg.format == "json":
        print(json.dumps({"residuals": sups, "tol": cfg.tol, "passed": ok,
                          "window": list(window)}, sort_keys=True))
    else:
        for name, v in sups.items():
            print(f"{name}\t{_fmt(v)}")
        print("PASS" if ok else f"FAIL: residual above tol {cfg.tol:g}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_relations(cfg: RunConfig, suite: str = "all") -> int:
    try:
        checks = relations.run_suite(suite, cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = json.dumps([c.to_json() for c in checks], indent=2, sort_keys=True) + "\n"
    with _open_out(cfg.output_path) as fh:
        fh.write(text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def cmd_index(cfg: RunConfig, ks, ms) -> int:
    rows = []
    for k in ks:
        if not k >= 0:
            raise UsageError(f"k must satisfy k >= 0 (got {k:g})")
        for method in ("quadrature", "gamma_formula"):
            rows.append(("cfiv", method, indices.cfiv(k, method)))
        for m in ms:
            if k > 0:
                rows.append(("itilde", "quadrature", indices.itilde(m, k, "quadrature")))
    if cfg.format == "json":
        text = json.dumps([dict(r.to_json(), quantity=q, method=r.method) for q, _, r in rows],
                          indent=2, sort_keys=True) + "\n"
    else:
        lines = ["quantity\tk\tm\tmethod\tnumeric\texact\tabs_diff"]
        for q, _, r in rows:
            m = "-" if r.m is None else str(r.m)
            lines.append(f"{q}\t{r.k:g}\t{m}\t{r.method}\t{r.numeric:.12f}\t{r.exact:.12f}\t{r.abs_diff:.3e}")
        text = "\n".join(lines) + "\n"
    with _open_out(cfg.output_path) as fh:
        fh.write(text)
    return EXIT_OK


_SU2_FNS = ("A", "B", "expA")
_SU3_FNS = ("A1", "A2", "expA1", "expA2", "B0", "B0bar")


def cmd_dump(cfg: RunConfig, fn: str = "all") -> int:
    allowed = _SU2_FNS if cfg.model.kind == ModelKind.SU2K else _SU3_FNS
    names = allowed if fn == "all" else (fn,)
    if any(n not in allowed for n in names):
        raise UsageError(f"--fn must be one of all, {', '.join(allowed)} for this model")
    cand = tba_solver.closed_form_candidate(cfg.model, cfg.grid)
    cols = {n: cand[n] for n in names}
    if cfg.format == "json":
        payload = {"theta": cfg.grid.points.tolist()}
        for n, v in cols.items():
            v = np.asarray(v)
            payload[n] = {"re": v.real.tolist(), "im": v.imag.tolist()} if np.iscomplexobj(v) else v.tolist()
        with _open_out(cfg.output_path) as fh:
            fh.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        with _open_out(cfg.output_path) as fh:
            write_csv(fh, cfg.grid.points, cols)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_model(p):
    p.add_argument("--model", choices=["su2k", "su3"], default="su2k", help="TBA system (default: su2k)")
    p.add_argument("--k", type=float, default=None, help="level k >= 0 for su2k")


def _add_grid(p, theta_min=-30.0):
    p.add_argument("--theta-min", type=float, default=theta_min, help=f"left grid end (default: {theta_min:g})")
    p.add_argument("--theta-max", type=float, default=5.0, help="right grid end (default: 5)")
    p.add_argument("--step", type=float, default=0.025, help="grid step (default: 0.025)")


def _add_out(p, formats=("csv", "json"), default="csv"):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=default, help=f"output format (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tba-exact", description="Exact and numerical solutions of massless N=2 TBA systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve the TBA by damped fixed-point iteration")
    _add_model(p)
    _add_grid(p)
    p.add_argument("--damping", type=float, default=0.5, help="Picard damping in (0, 1] (default: 0.5)")
    p.add_argument("--tol", type=float, default=1e-11, help="sup-norm update tolerance (default: 1e-11)")
    p.add_argument("--max-iter", type=int, default=5000, help="iteration cap (default: 5000)")
    p.add_argument("--out", default=None, help="output prefix; writes PREFIX.csv and PREFIX.json (default: tba_solution)")

    p = sub.add_parser("verify", help="residual of the closed-form solution in the TBA")
    _add_model(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=1e-6, help="pass threshold for each residual (default: 1e-6)")
    p.add_argument("--window-min", type=float, default=-10.0, help="left end of residual window (default: -10)")
    p.add_argument("--window-max", type=float, default=3.0, help="right end of residual window (default: 3)")
    p.add_argument("--format", choices=("text", "json"), default="text", help="report format (default: text)")

    p = sub.add_parser("relations", help="run the functional-identity checks (JSON report)")
    p.add_argument("--suite", choices=relations.SUITES, default="all", help="checks to run (default: all)")
    p.add_argument("--seed", type=int, default=42, help="sample seed (default: 42)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("index", help="CFIV index and I~_m table")
    p.add_argument("--k", type=float, nargs="+", default=[1.0, 2.0, 3.0, 4.0], help="levels (default: 1 2 3 4)")
    p.add_argument("--m", type=int, nargs="*", default=[], help="orders m for I~_m (default: none)")
    _add_out(p, ("table", "json"), "table")

    p = sub.add_parser("dump", help="sample the closed forms on a grid")
    _add_model(p)
    _add_grid(p, theta_min=-12.0)
    p.add_argument("--fn", default="all", help="function: all, A, B, expA (su2k) or A1, A2, expA1, expA2, B0, B0bar (su3)")
    _add_out(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        with _threads():
            if args.command == "solve":
                return cmd_solve(cfg, args.max_iter)
            if args.command == "verify":
                if args.window_min >= args.window_max:
                    raise UsageError("window-min must be below window-max")
                return cmd_verify(cfg, (args.window_min, args.window_max))
            if args.command == "relations":
                return cmd_relations(cfg, args.suite)
            if args.command == "index":
                if any(m < 1 for m in args.m):
                    raise UsageError("m must be a positive integer")
                return cmd_index(cfg, args.k, args.m)
            return cmd_dump(cfg, args.fn)
    except UsageError as exc:
        print(f"tba-exact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
