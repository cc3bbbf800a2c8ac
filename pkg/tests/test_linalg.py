"""Tridiagonal storage, Thomas solves, dense kernels and singular-value estimates."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from src.compact.errors import DenseLimitError, SingularMatrixError, ZeroPivotError
from src.compact.linalg import (
    MAX_DENSE_ORDER,
    TridiagonalLU,
    TridiagonalMatrix,
    dense_from_tridiagonal,
    dense_solve,
    eigenvalues_dense,
    gram_bands,
    max_singular_value,
    min_singular_value,
    pencil_operator,
    residual_norm,
    spectral_norm,
    thomas_solve,
    verify_eigenpairs,
)


def _by_parts(value: complex) -> tuple[float, float]:
    return (round(value.real, 8), round(value.imag, 8))


def _random_dominant(rng: np.random.Generator, n: int) -> TridiagonalMatrix:
    sub = rng.uniform(-1, 1, n - 1)
    sup = rng.uniform(-1, 1, n - 1)
    diag = 2.5 + rng.uniform(0, 1, n)
    return TridiagonalMatrix(sub=sub, diag=diag, sup=sup)


class TestTridiagonalMatrix:
    def test_band_lengths_checked(self):
        with pytest.raises(ValueError):
            TridiagonalMatrix.from_bands([1.0], [1.0, 2.0, 3.0], [1.0, 1.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            TridiagonalMatrix.from_bands([np.nan], [1.0, 2.0], [0.0])

    def test_dense_layout(self):
        A = TridiagonalMatrix.from_bands([5.0], [1.0, 2.0], [7.0])
        np.testing.assert_array_equal(dense_from_tridiagonal(A), [[1.0, 7.0], [5.0, 2.0]])

    def test_one_by_one(self):
        A = TridiagonalMatrix.from_bands([], [4.0], [])
        np.testing.assert_array_equal(dense_from_tridiagonal(A), [[4.0]])

    def test_weak_rows(self):
        A = TridiagonalMatrix.from_bands([1.0, 1.0], [3.0, 2.0, 0.5], [1.0, 1.0])
        np.testing.assert_array_equal(A.weak_rows(), [1, 2])

    def test_matvec_matches_dense(self, rng: np.random.Generator):
        A = _random_dominant(rng, 9)
        x = rng.normal(size=9)
        np.testing.assert_allclose(A.matvec(x), dense_from_tridiagonal(A) @ x, rtol=1e-13, atol=1e-13)

    def test_combine(self):
        X = TridiagonalMatrix.from_bands([1.0], [2.0, 2.0], [3.0])
        Y = TridiagonalMatrix.from_bands([1.0], [1.0, 1.0], [1.0])
        np.testing.assert_array_equal(dense_from_tridiagonal(X.combine(Y, -0.5)), [[1.5, 2.5], [0.5, 1.5]])

    def test_banded_layout_solves(self, rng: np.random.Generator):
        A = _random_dominant(rng, 6)
        b = rng.normal(size=6)
        x = scipy.linalg.solve_banded((1, 1), A.banded(), b)
        np.testing.assert_allclose(A.matvec(x), b, atol=1e-12)

    def test_row_and_column_sums(self):
        A = TridiagonalMatrix.from_bands([-1.0, 2.0], [3.0, -4.0, 5.0], [0.5, -0.25])
        np.testing.assert_array_equal(A.abs_row_sums(), [3.5, 5.25, 7.0])
        np.testing.assert_array_equal(A.abs_col_sums(), [4.0, 6.5, 5.25])
        assert A.weak_rows().size == 0


class TestThomas:
    def test_identity(self):
        x = thomas_solve(TridiagonalMatrix.identity(3), np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(x, [1.0, 2.0, 3.0])

    def test_known_system(self):
        A = TridiagonalMatrix.from_bands([1.0, 1.0], [2.0, 2.0, 2.0], [1.0, 1.0])
        np.testing.assert_allclose(thomas_solve(A, np.array([4.0, 8.0, 8.0])), [1.0, 2.0, 3.0], rtol=1e-14)

    def test_zero_pivot_names_row(self):
        A = TridiagonalMatrix.from_bands([0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0])
        with pytest.raises(ZeroPivotError) as info:
            thomas_solve(A, np.ones(3))
        assert info.value.row == 0

    def test_zero_pivot_in_later_row(self):
        A = TridiagonalMatrix.from_bands([1.0], [1.0, 1.0], [1.0])
        with pytest.raises(ZeroPivotError) as info:
            TridiagonalLU(A)
        assert info.value.row == 1

    def test_factor_reused(self, rng: np.random.Generator):
        A = _random_dominant(rng, 50)
        lu = TridiagonalLU(A)
        D = dense_from_tridiagonal(A)
        for _ in range(3):
            b = rng.normal(size=50)
            np.testing.assert_allclose(lu.solve(b), np.linalg.solve(D, b), rtol=1e-10, atol=1e-12)

    def test_rhs_shape_checked(self):
        with pytest.raises(ValueError):
            TridiagonalLU(TridiagonalMatrix.identity(3)).solve(np.ones(4))


class TestDense:
    def test_identity_solve(self, rng: np.random.Generator):
        B = rng.normal(size=(4, 3))
        np.testing.assert_array_equal(dense_solve(np.eye(4), B), B)

    def test_random_solve_residual(self, rng: np.random.Generator):
        A = rng.normal(size=(5, 5)) + 5 * np.eye(5)
        B = rng.normal(size=(5, 2))
        assert residual_norm(A, dense_solve(A, B), B) < 1e-10

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            dense_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))

    @pytest.mark.parametrize(
        "A, expected",
        [
            (np.diag([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0]),
            (np.array([[0.0, -1.0], [1.0, 0.0]]), [-1j, 1j]),
            (scipy.linalg.companion([1.0, -3.0, 2.0]), [1.0, 2.0]),
        ],
    )
    def test_eigenvalues(self, A: np.ndarray, expected: list[complex]):
        values = eigenvalues_dense(A)
        expected = np.array(expected, dtype=complex)
        np.testing.assert_allclose(sorted(values, key=_by_parts), sorted(expected, key=_by_parts), atol=1e-12)

    def test_residuals_bound_smallest_singular_value(self, rng: np.random.Generator):
        A = rng.normal(size=(6, 6))
        values, vectors = scipy.linalg.eig(A)
        residuals = verify_eigenpairs(A, values, vectors)
        assert np.all(residuals < 1e-12)
        scale = scipy.linalg.norm(A, 2)
        for lam, bound in zip(values, residuals):
            assert scipy.linalg.svdvals(A - lam * np.eye(6))[-1] / scale <= bound + 1e-15

    def test_wrong_eigenvalue_logged(self, caplog):
        A = np.diag([1.0, 2.0])
        with caplog.at_level("WARNING", logger="src.compact.linalg"):
            residuals = verify_eigenpairs(A, np.array([1.0, 2.5]), np.eye(2))
        assert residuals[1] == pytest.approx(0.25)
        assert "eigenvalue residual" in caplog.text

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            eigenvalues_dense(np.ones((2, 3)))


class TestSingularValues:
    def test_identity(self):
        I3 = TridiagonalMatrix.identity(3)
        assert spectral_norm(I3) == pytest.approx(1.0)
        assert min_singular_value(I3) == pytest.approx(1.0)

    def test_diagonal(self):
        assert spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0, rel=1e-10)
        assert min_singular_value(TridiagonalMatrix.from_bands([0.0], [2.0, 4.0], [0.0])) == pytest.approx(2.0)

    def test_gram_bands_match_dense(self, rng: np.random.Generator):
        A = _random_dominant(rng, 6)
        D = dense_from_tridiagonal(A)
        G = D @ D.T
        d0, d1, d2 = gram_bands(A)
        np.testing.assert_allclose(d0, np.diag(G), rtol=1e-14)
        np.testing.assert_allclose(d1, np.diag(G, 1), rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(d2, np.diag(G, 2), rtol=1e-14, atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4, 40])
    def test_methods_agree_with_svd(self, rng: np.random.Generator, n: int):
        A = _random_dominant(rng, n)
        sigma = scipy.linalg.svdvals(dense_from_tridiagonal(A))
        for method in ("banded", "iteration"):
            assert max_singular_value(A, method) == pytest.approx(sigma[0], rel=1e-7)
            assert min_singular_value(A, method) == pytest.approx(sigma[-1], rel=1e-7)


class TestPencilOperator:
    def test_matches_dense_inverse(self, rng: np.random.Generator):
        X = _random_dominant(rng, 8)
        Y = _random_dominant(rng, 8)
        W = pencil_operator(X, Y)
        np.testing.assert_allclose(dense_from_tridiagonal(X) @ W, dense_from_tridiagonal(Y), atol=1e-12)

    def test_dense_limit(self):
        big = TridiagonalMatrix.identity(MAX_DENSE_ORDER + 1)
        with pytest.raises(DenseLimitError):
            pencil_operator(big, big)
