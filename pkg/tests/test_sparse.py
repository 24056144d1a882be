import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amgpoly.problems import poisson3d
from amgpoly.sparse import (
    CsrMatrix,
    dense_cholesky_solve,
    dense_sym_eig,
    fused_update,
    jacobi_sym_eig,
    read_matrix_market,
    spmv,
    write_matrix_market,
)

from conftest import random_spd, tridiag


class TestCsrMatrix:
    def test_identity_roundtrip(self):
        eye = CsrMatrix.identity(3)
        assert np.array_equal(eye.to_dense(), np.eye(3))

    def test_from_coo_sums_duplicates_and_drops_zeros(self):
        A = CsrMatrix.from_coo(2, 2, [0, 0, 1], [0, 0, 1], [1.0, 2.0, 0.0])
        assert A.nnz == 1
        assert A.to_dense()[0, 0] == 3.0

    def test_column_indices_sorted_within_rows(self):
        A = CsrMatrix.from_coo(1, 4, [0, 0, 0], [3, 0, 2], [1.0, 2.0, 3.0])
        assert np.all(np.diff(A.col_idx) > 0)

    def test_invalid_row_ptr_rejected(self):
        with pytest.raises(ValueError):
            CsrMatrix(2, 2, np.array([0, 1]), np.array([0]), np.array([1.0]))

    def test_transpose_symmetry_check(self):
        A = tridiag(5)
        assert A.is_symmetric()
        B = CsrMatrix.from_dense([[2.0, -1.0], [0.0, 2.0]])
        assert not B.is_symmetric()


class TestSpmv:
    def test_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(spmv(CsrMatrix.identity(3), x), x)

    def test_laplacian_constant_vector(self):
        y = spmv(tridiag(3), np.ones(3))
        assert np.array_equal(y, [1.0, 0.0, 1.0])

    def test_poisson3d_column_against_dense(self):
        A, _ = poisson3d(2)
        e1 = np.zeros(8)
        e1[1] = 1.0
        assert np.array_equal(spmv(A, e1), A.to_dense()[:, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            spmv(CsrMatrix.identity(3), np.ones(4))

    @given(st.integers(2, 30), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, n, seed):
        rng = np.random.default_rng(seed)
        A = CsrMatrix.from_dense(rng.standard_normal((n, n)))
        x, y = rng.standard_normal(n), rng.standard_normal(n)
        a, b = rng.standard_normal(2)
        lhs = spmv(A, a * x + b * y)
        rhs = a * spmv(A, x) + b * spmv(A, y)
        assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-13 * np.abs(rhs).max())


class TestFusedUpdate:
    def test_zero_coefficients(self):
        s, r = np.array([1.0]), np.array([3.0])
        d, x = np.array([2.0]), np.array([5.0])
        fused_update(0.0, 0.0, 0.0, s, r, d, x)
        assert r[0] == 2.0 and d[0] == 0.0 and x[0] == 5.0

    def test_hand_evaluated_scalar(self):
        s, r = np.array([1.0]), np.array([3.0])
        d, x = np.array([2.0]), np.array([5.0])
        fused_update(0.5, 0.4, 2.0, s, r, d, x)
        assert r[0] == 2.0
        assert d[0] == pytest.approx(4.4, abs=1e-15)
        assert x[0] == pytest.approx(9.4, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fused_update(1.0, 1.0, 1.0, np.ones(2), np.ones(3), np.ones(3), np.ones(3))

    @given(st.integers(1, 200), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_bitwise_equals_unfused(self, n, seed):
        rng = np.random.default_rng(seed)
        s, r, d, x = (rng.standard_normal(n) for _ in range(4))
        rho, rho_prev, c = rng.standard_normal(3)
        r2, d2, x2 = r.copy(), d.copy(), x.copy()
        fused_update(rho, rho_prev, c, s, r, d, x)
        r2 -= s
        d2 = rho * rho_prev * d2 + c * r2
        x2 += d2
        assert np.array_equal(r, r2)
        assert np.array_equal(d, d2)
        assert np.array_equal(x, x2)


class TestDenseEig:
    def test_diagonal(self):
        w, _ = dense_sym_eig(np.diag([3.0, 1.0, 2.0]))
        assert np.array_equal(w, [1.0, 2.0, 3.0])

    def test_laplacian_analytic_spectrum(self):
        n = 12
        w, _ = dense_sym_eig(tridiag(n).to_dense())
        exact = 2.0 - 2.0 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1))
        assert np.allclose(w, np.sort(exact), atol=1e-12)

    def test_reconstruction(self, rng):
        S = random_spd(20, seed=7).to_dense()
        w, V = dense_sym_eig(S)
        R = V @ np.diag(w) @ V.T
        assert np.linalg.norm(R - S) <= 1e-9 * np.linalg.norm(S)
        assert np.allclose(V.T @ V, np.eye(20), atol=1e-10)
        assert np.all(w > 0)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError):
            dense_sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_jacobi_cross_check(self):
        S = random_spd(15, seed=3).to_dense()
        w_ref, _ = dense_sym_eig(S)
        w_jac, V = jacobi_sym_eig(S)
        assert np.allclose(w_jac, w_ref, rtol=1e-10, atol=1e-10)
        assert np.linalg.norm(S @ V - V * w_jac) <= 1e-9 * np.linalg.norm(S)


class TestCholesky:
    def test_identity(self):
        assert np.allclose(dense_cholesky_solve(np.eye(3), [4.0, 5.0, 6.0]), [4, 5, 6])

    def test_diagonal(self):
        assert np.allclose(dense_cholesky_solve(np.diag([2.0, 4.0]), [2.0, 8.0]), [1, 2])

    def test_tridiag_forward_multiply(self):
        A = tridiag(4).to_dense()
        xs = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.allclose(dense_cholesky_solve(A, A @ xs), xs, atol=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            dense_cholesky_solve(np.diag([1.0, -1.0]), [1.0, 1.0])


class TestGalerkinSymmetry:
    def test_rap_symmetric(self, rng):
        A = random_spd(12, seed=11).to_dense()
        P = rng.standard_normal((12, 5))
        R = P.T @ A @ P
        assert np.max(np.abs(R - R.T)) <= 1e-13 * np.max(np.abs(R))


class TestMatrixMarket:
    def test_roundtrip_general(self, tmp_path):
        A = tridiag(6)
        p = tmp_path / "a.mtx"
        write_matrix_market(p, A)
        B = read_matrix_market(p)
        assert np.array_equal(A.to_dense(), B.to_dense())

    def test_symmetric_storage_expanded(self, tmp_path):
        A = tridiag(6)
        p = tmp_path / "a_sym.mtx"
        write_matrix_market(p, A, symmetric=True)
        B = read_matrix_market(p)
        assert B.nnz == A.nnz
        assert np.array_equal(A.to_dense(), B.to_dense())
