import numpy as np
import pytest
import scipy.sparse

from amgpoly.sparse import CsrMatrix


def tridiag(n, lo=-1.0, di=2.0, up=-1.0):
    return CsrMatrix.from_scipy(
        scipy.sparse.diags([lo, di, up], [-1, 0, 1], shape=(n, n)).tocsr()
    )


def poisson2d_5pt(m):
    """5-point Laplacian on an m x m interior grid (diagonal 4)."""
    T = scipy.sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(m, m))
    eye = scipy.sparse.identity(m)
    return CsrMatrix.from_scipy(
        (scipy.sparse.kron(eye, T) + scipy.sparse.kron(T, eye)).tocsr()
    )


def linear_interp_1d(n):
    """Linear-interpolation prolongator with coarse points at odd fine indices."""
    coarse = range(1, n, 2)
    P = np.zeros((n, len(coarse)))
    for j, i in enumerate(coarse):
        P[i, j] = 1.0
        if i - 1 >= 0:
            P[i - 1, j] += 0.5
        if i + 1 < n:
            P[i + 1, j] += 0.5
    return CsrMatrix.from_dense(P)


def random_spd(n, seed=0, shift=0.0):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    S = G.T @ G + (shift + n * 0.05) * np.eye(n)
    return CsrMatrix.from_dense(S)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
