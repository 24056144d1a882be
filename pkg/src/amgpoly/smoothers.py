"""Runtime smoother kernels and the brute-force error-polynomial oracle.

Every family damps the error as e_out = p(M^-1 A) e_in for its polynomial p:

  l1_jacobi   p(t) = (1 - t)^k          (k plain sweeps)
  cheb4       p(t) = W_k(1 - 2t)/(2k+1)
  opt_cheb4   p(t) = sum_j (beta_j - beta_{j+1})/(2j+1) W_j(1 - 2t)
  opt_cheb1   p(t) = tau_k^{[a,1]}(t)

with M the l1-Jacobi diagonal, for which the spectrum of M^-1 A lies in
(0, 1] and the spectral-radius divisor of the recurrences is 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .chebyshev import ScaledChebParams
from .optimize import BetaTable, load_beta_tables, optimal_a
from .sparse import CsrMatrix, fused_update

log = logging.getLogger(__name__)

FAMILIES = ("l1_jacobi", "cheb4", "opt_cheb4", "opt_cheb1")


@dataclass
class L1JacobiData:
    """Per-row diagonal M_i = a_ii + sum_{j != i} |a_ij|."""

    m_diag: np.ndarray


def l1_jacobi_diag(A):
    """l1-Jacobi diagonal of a square matrix with positive diagonal."""
    if hasattr(A, "l1_diag"):
        return L1JacobiData(m_diag=A.l1_diag())
    if A.nrows != A.ncols:
        raise ValueError("matrix must be square")
    sp = A.to_scipy()
    diag = sp.diagonal()
    if np.any(diag <= 0.0):
        raise ValueError("non-positive diagonal entry")
    abs_row = np.asarray(np.abs(sp).sum(axis=1)).ravel()
    return L1JacobiData(m_diag=abs_row - np.abs(diag) + diag)


@dataclass
class PolySmootherConfig:
    """Family, degree, and the per-family parameters of a smoother."""

    family: str
    degree: int
    a: float | None = None           # opt_cheb1 interval endpoint
    beta: BetaTable | None = None    # opt_cheb4 coefficient table
    rho_scale: float = 1.0           # rho(M^-1 A) divisor; 1 for l1-Jacobi

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown smoother family {self.family!r}")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.rho_scale <= 0.0:
            raise ValueError("rho_scale must be positive")
        if self.family == "opt_cheb1":
            if self.a is None:
                self.a = optimal_a(self.degree)
            if not 0.0 < self.a < 1.0:
                raise ValueError("a must lie in (0, 1)")
        if self.family == "opt_cheb4" and self.beta is None:
            tables = load_beta_tables()
            if self.degree in tables:
                self.beta = tables[self.degree]
            else:
                log.warning(
                    "no beta table for degree %d; falling back to plain cheb4",
                    self.degree,
                )
                self.family = "cheb4"
        if self.beta is not None and len(self.beta.beta) != self.degree:
            raise ValueError("beta table length must equal the degree")


def _matvec(A, x):
    return A.matvec(x) if hasattr(A, "matvec") else A @ x


def smoother_apply(config, A, M, b, x0):
    """Apply one degree-k smoother step: returns the updated iterate.

    Each family performs exactly k operator applications (SpMV), matching
    the cost of k basic sweeps.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    if len(b) != len(x) or len(b) != A.nrows:
        raise ValueError("dimension mismatch")
    m = M.m_diag
    k = config.degree
    rho = config.rho_scale

    if config.family == "l1_jacobi":
        for _ in range(k):
            r = b - _matvec(A, x)
            x += r / m
        return x

    if config.family in ("cheb4", "opt_cheb4"):
        betas = config.beta.beta if config.family == "opt_cheb4" else np.ones(k)
        r = b - _matvec(A, x)
        z = np.zeros_like(x)
        for j in range(1, k + 1):
            z *= (2 * j - 3) / (2 * j + 1)
            z += (8 * j - 4) / (2 * j + 1) / rho * (r / m)
            x += betas[j - 1] * z
            if j < k:  # final residual is not consumed
                r -= _matvec(A, z)
        return x

    # opt_cheb1: first-kind acceleration with the fused r/d/x update
    p = ScaledChebParams(config.a, k)
    theta, delta = p.theta, p.delta
    sigma1 = theta / delta
    r = (b - _matvec(A, x)) / m / rho
    rho_prev = 1.0 / sigma1
    d = r / theta
    x += d
    for _ in range(1, k):
        s = _matvec(A, d) / m / rho
        rho_cur = 1.0 / (2.0 * sigma1 - rho_prev)
        fused_update(rho_cur, rho_prev, 2.0 * rho_cur / delta, s, r, d, x)
        rho_prev = rho_cur
    return x


def error_polynomial_coeffs(config):
    """Monomial coefficients (ascending) of the family's error polynomial."""
    k = config.degree
    t = npoly.Polynomial([0.0, 1.0])
    if config.family == "l1_jacobi":
        poly = (1.0 - t) ** k
    elif config.family in ("cheb4", "opt_cheb4"):
        arg = 1.0 - 2.0 * t
        W = [npoly.Polynomial([1.0]), 2.0 * arg + 1.0]
        for _ in range(2, k + 1):
            W.append(2.0 * arg * W[-1] - W[-2])
        if config.family == "cheb4":
            poly = W[k] / (2 * k + 1)
        else:
            ext = np.concatenate(([1.0], config.beta.beta, [0.0]))
            poly = sum(
                float((ext[j] - ext[j + 1]) / (2 * j + 1)) * W[j] for j in range(k + 1)
            )
    else:
        params = ScaledChebParams(config.a, k)
        ratio = params.theta / params.delta
        shift = 2.0 * (params.theta - t) / params.delta
        sig_m, sig = 1.0, ratio
        tm, tc = npoly.Polynomial([1.0]), 1.0 - t / params.theta
        for _ in range(1, k):
            sig_next = 2.0 * ratio * sig - sig_m
            t_next = (sig / sig_next) * (shift * tc - (sig_m / sig) * tm)
            sig_m, sig = sig, sig_next
            tm, tc = tc, t_next
        poly = tc
    return np.asarray(poly.coef, dtype=np.float64)


def smoother_error_oracle(A, M, config, e0):
    """Evaluate p(M^-1 A) e0 by Horner on the monomial coefficients.

    Brute-force reference for smoother_apply; desk-scale sizes only.
    """
    coef = error_polynomial_coeffs(config)
    m = M.m_diag
    rho = config.rho_scale
    out = coef[-1] * np.asarray(e0, dtype=np.float64)
    for c in coef[-2::-1]:
        out = _matvec(A, out) / m / rho
        out += c * e0
    return out


def smoother_error_apply(config, A, M, e0):
    """Error propagator action via the runtime kernel: G e0 with b = 0."""
    return smoother_apply(config, A, M, np.zeros_like(e0), e0)


def as_preconditioner(config, A, M):
    """The smoother as a symmetric linear operator r -> x (zero initial guess)."""

    def apply(r):
        return smoother_apply(config, A, M, r, np.zeros_like(r))

    return apply


def estimate_rho(A, M, iters=25):
    """Power-iteration estimate of rho(M^-1 A) for non-l1 base smoothers.

    Unused by the default configuration (l1-Jacobi guarantees rho <= 1).
    """
    v = np.ones(A.nrows)
    lam = 1.0
    for _ in range(iters):
        w = _matvec(A, v) / M.m_diag
        lam = np.linalg.norm(w)
        if lam == 0.0:
            return 0.0
        v = w / lam
    return lam
