"""Preconditioned conjugate gradient solvers (classical PCG and flexible FCG).

The stopping test uses the relative residual ||b - A x|| / ||b||, the only
computable proxy for the error tolerance quoted with the benchmark runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np


@dataclass
class KrylovConfig:
    variant: str = "pcg"  # pcg | fcg
    tol: float = 1e-7
    itmax: int = 1000
    record_history: bool = True

    def __post_init__(self):
        if self.variant not in ("pcg", "fcg"):
            raise ValueError(f"unknown Krylov variant {self.variant!r}")
        if self.tol <= 0.0 or self.itmax < 1:
            raise ValueError("tol must be positive and itmax >= 1")


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    final_relres: float
    residual_history: list = field(default_factory=list)
    spmv_count: int = 0
    precond_count: int = 0
    breakdown: bool = False
    elapsed_s: float = 0.0


def _matvec(A, x):
    return A.matvec(x) if hasattr(A, "matvec") else A @ x


def solve(A, b, precond=None, cfg=None, x0=None):
    """Solve SPD A x = b; returns (x, SolveReport).

    ``precond`` is a callable r -> z applying a fixed SPD preconditioner (or
    None for plain CG).  The flexible variant re-orthogonalizes each new
    direction against the previous one only, which tolerates mildly variable
    preconditioning; with a fixed preconditioner both variants coincide up
    to roundoff.
    """
    cfg = cfg or KrylovConfig()
    b = np.asarray(b, dtype=np.float64)
    n = len(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    t0 = time.perf_counter()

    spmv = 0
    pc = 0
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x * 0.0, SolveReport(0, True, 0.0, [], 0, 0, elapsed_s=time.perf_counter() - t0)

    r = b - _matvec(A, x)
    spmv += 1
    history = []
    relres = np.linalg.norm(r) / bnorm
    if cfg.record_history:
        history.append(relres)

    def report(it, converged, breakdown=False):
        return SolveReport(
            iterations=it,
            converged=converged,
            final_relres=relres,
            residual_history=history,
            spmv_count=spmv,
            precond_count=pc,
            breakdown=breakdown,
            elapsed_s=time.perf_counter() - t0,
        )

    if relres <= cfg.tol:
        return x, report(0, True)

    apply_prec = precond if precond is not None else (lambda v: v.copy())
    z = apply_prec(r)
    pc += 1
    d = z.copy()
    rz = float(r @ z)

    for it in range(1, cfg.itmax + 1):
        Ad = _matvec(A, d)
        spmv += 1
        dAd = float(d @ Ad)
        if dAd <= 0.0:
            return x, report(it - 1, False, breakdown=True)
        alpha = rz / dAd if cfg.variant == "pcg" else float(r @ d) / dAd
        x += alpha * d
        r -= alpha * Ad
        relres = np.linalg.norm(r) / bnorm
        if cfg.record_history:
            history.append(relres)
        if relres <= cfg.tol:
            return x, report(it, True)
        z = apply_prec(r)
        pc += 1
        if cfg.variant == "pcg":
            rz_new = float(r @ z)
            beta = rz_new / rz
            rz = rz_new
            d = z + beta * d
        else:
            # one-direction orthogonalization: make the new direction
            # A-orthogonal to the previous one
            beta = float(z @ Ad) / dAd
            d = z - beta * d
    return x, report(cfg.itmax, False)
