"""Benchmark CLI: reproducible experiments over the library building blocks.

Subcommands
-----------
optimize       CSV of per-degree smoother parameters and bounds
bounds         CSV comparing the three smoothing-constant series
solve          AMG-PCG run from a flat key=value config file, JSON report
spectrum-grid  iteration-count grid for polynomial-preconditioned CG
import         summarize a Matrix Market file

Every command is a pure function of its inputs and the shipped parameter
tables: outputs are byte-identical across runs.  Wall-clock metadata goes to
stderr, never into the report files.  Exit codes: 0 success, 2 config error,
3 solver breakdown.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .amg import AmgHierarchy, CoarseningConfig, as_vcycle_preconditioner, build_hierarchy
from .krylov import KrylovConfig, solve
from .optimize import gamma_cheb4, lambda_of, load_beta_tables, optimal_a, params_csv_rows
from .problems import aniso2d_q1, poisson3d, spectral_synthetic
from .smoothers import PolySmootherConfig, as_preconditioner, l1_jacobi_diag
from .sparse import read_matrix_market

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREAKDOWN = 3


class ConfigError(Exception):
    pass


def _fmt(v):
    """17-significant-digit float serialization (lossless round-trip)."""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _max_workers():
    raw = os.environ.get("AMGPOLY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"AMGPOLY_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


# -- optimize / bounds -------------------------------------------------------

PARAMS_HEADER = [
    "k", "a_star", "lambda_k", "gamma_cheb4", "gamma_opt4",
    "a_lower", "a_upper", "lam_lower", "lam_upper",
]


def cmd_optimize(args):
    if not 0 <= args.kmax <= 30:
        raise ConfigError("kmax must lie in 0..30")
    rows = [[r[h] for h in PARAMS_HEADER] for r in params_csv_rows(args.kmax)]
    out, close = _open_output(args.output)
    try:
        _write_rows(out, PARAMS_HEADER, rows)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_bounds(args):
    if not 0 <= args.kmax <= 12:
        raise ConfigError("kmax must lie in 0..12")
    betas = load_beta_tables()
    header = ["k", "gamma_cheb4", "lambda_1st", "gamma_opt4", "crossover"]
    rows = []
    for k in range(1, args.kmax + 1):
        lam = lambda_of(k, optimal_a(k))
        g4 = gamma_cheb4(k)
        go4 = betas[k].gamma_value if k in betas else math.nan
        rows.append([k, g4, lam, go4, int(lam < g4)])
    out, close = _open_output(args.output)
    try:
        _write_rows(out, header, rows)
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- solve -------------------------------------------------------------------

_SOLVE_DEFAULTS = {
    "problem": "poisson3d",
    "m": "8",
    "epsilon": "1.0",
    "angle": "0.0",
    "n": "64",
    "distribution": "equispaced",
    "coarsening": "smoothed_aggregation",
    "strength_theta": "0.01",
    "matching_sweeps": "3",
    "prolongator_smoothing": "true",
    "smoother": "opt_cheb1",
    "degree": "4",
    "variant": "pcg",
    "tol": "1e-7",
    "itmax": "1000",
    "coarse_solver": "l1_jacobi",
    "coarse_sweeps": "30",
    "min_coarse_size": "200",
    "max_levels": "10",
}


def parse_config(path, overrides):
    """Flat INI-style key=value config with # comments; overrides win."""
    cfg = dict(_SOLVE_DEFAULTS)
    seen = {}
    if path is not None:
        try:
            with open(path) as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    if "=" not in line:
                        raise ConfigError(f"{path}:{lineno}: expected key = value")
                    key, _, val = line.partition("=")
                    seen[key.strip()] = val.strip()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, _, val = item.partition("=")
        seen[key.strip()] = val.strip()
    for key, val in seen.items():
        if key not in cfg:
            raise ConfigError(f"unknown config key {key!r}")
        cfg[key] = val
    return cfg


def _to_bool(s):
    if s.lower() in ("true", "1", "yes"):
        return True
    if s.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def build_problem(cfg):
    kind = cfg["problem"]
    try:
        if kind == "poisson3d":
            return poisson3d(int(cfg["m"]))
        if kind == "aniso2d":
            return aniso2d_q1(int(cfg["m"]), float(cfg["epsilon"]), float(cfg["angle"]))
        if kind == "spectral":
            return spectral_synthetic(int(cfg["n"]), cfg["distribution"])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad problem config: {exc}") from exc
    raise ConfigError(f"unknown problem kind {cfg['problem']!r}")


def run_solve(cfg):
    A, b = build_problem(cfg)
    try:
        smoother = PolySmootherConfig(family=cfg["smoother"], degree=int(cfg["degree"]))
        coarsening = CoarseningConfig(
            kind=cfg["coarsening"],
            strength_theta=float(cfg["strength_theta"]),
            matching_sweeps=int(cfg["matching_sweeps"]),
            prolongator_smoothing=_to_bool(cfg["prolongator_smoothing"]),
        )
        kcfg = KrylovConfig(
            variant=cfg["variant"], tol=float(cfg["tol"]), itmax=int(cfg["itmax"])
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["problem"] == "spectral":
        # dense synthetic operator: precondition with the smoother alone
        M = l1_jacobi_diag(A)
        precond = as_preconditioner(smoother, A, M)
        hierarchy = None
    else:
        hierarchy = build_hierarchy(
            A,
            coarsening=coarsening,
            smoother=smoother,
            max_levels=int(cfg["max_levels"]),
            min_coarse_size=int(cfg["min_coarse_size"]),
            coarse_solver=cfg["coarse_solver"],
            coarse_sweeps=int(cfg["coarse_sweeps"]),
        )
        precond = as_vcycle_preconditioner(hierarchy)
    _, rep = solve(A, b, precond=precond, cfg=kcfg)
    report = {
        "config": cfg,
        "solve": {
            "iterations": rep.iterations,
            "converged": rep.converged,
            "final_relres": rep.final_relres,
            "residual_history": rep.residual_history,
            "spmv_count": rep.spmv_count,
            "precond_count": rep.precond_count,
            "breakdown": rep.breakdown,
        },
    }
    if hierarchy is not None:
        report["hierarchy"] = hierarchy.summary()
    return report, rep


def cmd_solve(args):
    cfg = parse_config(args.config, args.override)
    t0 = time.perf_counter()
    report, rep = run_solve(cfg)
    elapsed = time.perf_counter() - t0
    out, close = _open_output(args.output)
    try:
        json.dump(report, out, indent=2)
        out.write("\n")
    finally:
        if close:
            out.close()
    print(f"elapsed_s={elapsed:.3f}", file=sys.stderr)
    return EXIT_BREAKDOWN if rep.breakdown else EXIT_OK


# -- spectrum-grid -----------------------------------------------------------

GRID_DISTRIBUTIONS = ("equispaced", "boundary", "gapped")


def _grid_cell(task):
    dist, n, k, tol, itmax = task
    A, b = spectral_synthetic(n, dist)
    M = l1_jacobi_diag(A)
    cfg = KrylovConfig(variant="pcg", tol=tol, itmax=itmax, record_history=False)
    iters = {}
    for family in ("opt_cheb1", "cheb4"):
        sm = PolySmootherConfig(family=family, degree=k)
        _, rep = solve(A, b, precond=as_preconditioner(sm, A, M), cfg=cfg)
        iters[family] = (rep.iterations, rep.converged)
    return dist, n, k, iters


def cmd_spectrum_grid(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    degrees = [int(s) for s in args.degrees.split(",")]
    if any(n % 2 or n > 1024 for n in sizes):
        raise ConfigError("sizes must be even and <= 1024")
    if any(k < 1 for k in degrees):
        raise ConfigError("degrees must be >= 1")
    tasks = [
        (dist, n, k, args.tol, args.itmax)
        for dist in GRID_DISTRIBUTIONS
        for n in sizes
        for k in degrees
    ]
    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grid_cell, tasks))
    else:
        results = [_grid_cell(t) for t in tasks]
    header = [
        "distribution", "n", "k",
        "iters_cheb1", "converged_cheb1", "iters_cheb4", "converged_cheb4", "diff",
    ]
    rows = []
    for dist, n, k, iters in results:  # task order == deterministic config order
        i1, c1 = iters["opt_cheb1"]
        i4, c4 = iters["cheb4"]
        rows.append([dist, n, k, i1, int(c1), i4, int(c4), i1 - i4])
    out, close = _open_output(args.output)
    try:
        _write_rows(out, header, rows)
    finally:
        if close:
            out.close()
    return EXIT_OK


# -- import ------------------------------------------------------------------


def cmd_import(args):
    try:
        A = read_matrix_market(args.matrix)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read matrix {args.matrix}: {exc}") from exc
    info = {
        "path": args.matrix,
        "nrows": A.nrows,
        "ncols": A.ncols,
        "nnz": A.nnz,
        "symmetric": bool(A.is_symmetric()),
    }
    d = A.diagonal() if A.nrows == A.ncols else np.array([])
    info["positive_diagonal"] = bool(len(d) and np.all(d > 0))
    json.dump(info, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def make_parser():
    p = argparse.ArgumentParser(prog="amgpoly", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    po = sub.add_parser("optimize", help="per-degree smoother parameter CSV")
    po.add_argument("--kmax", type=int, required=True)
    po.add_argument("--output", "-o", default=None)
    po.set_defaults(func=cmd_optimize)

    pb = sub.add_parser("bounds", help="smoothing-constant comparison CSV")
    pb.add_argument("--kmax", type=int, required=True)
    pb.add_argument("--output", "-o", default=None)
    pb.set_defaults(func=cmd_bounds)

    ps = sub.add_parser("solve", help="AMG-PCG run from a key=value config")
    ps.add_argument("--config", default=None)
    ps.add_argument("--override", action="append", metavar="KEY=VAL")
    ps.add_argument("--output", "-o", default=None)
    ps.set_defaults(func=cmd_solve)

    pg = sub.add_parser("spectrum-grid", help="iteration grid, smoother-only CG")
    pg.add_argument("--sizes", required=True, help="comma-separated even sizes")
    pg.add_argument("--degrees", required=True, help="comma-separated degrees")
    pg.add_argument("--tol", type=float, default=1e-5)
    pg.add_argument("--itmax", type=int, default=2000)
    pg.add_argument("--output", "-o", default=None)
    pg.set_defaults(func=cmd_spectrum_grid)

    pi = sub.add_parser("import", help="summarize a Matrix Market file")
    pi.add_argument("--matrix", required=True)
    pi.set_defaults(func=cmd_import)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
