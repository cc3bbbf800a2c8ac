"""
Tridiagonal and small dense linear algebra.

Tridiagonal matrices are kept in band storage (sub, diag, sup). Dense
matrices are plain ``numpy.ndarray`` values; eigenvalues, LU and singular
values come from ``scipy.linalg``.

Usage:
    A = TridiagonalMatrix.from_bands([1.0, 1.0], [2.0, 2.0, 2.0], [1.0, 1.0])
    thomas_solve(A, np.array([4.0, 8.0, 8.0]))  # array([1., 2., 3.])
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from src.compact.errors import ConvergenceFailure, DenseLimitError, SingularMatrixError, ZeroPivotError

logger = logging.getLogger(__name__)

DenseMatrix = np.ndarray
ComplexList = np.ndarray

PIVOT_FLOOR = 1e-300
POWER_TOLERANCE = 1e-12
POWER_MAX_ITERATIONS = 10_000
MAX_DENSE_ORDER = 1000
EIGEN_RESIDUAL_TOLERANCE = 1e-8

NormMethod = Literal["iteration", "banded"]


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Band storage of an n×n tridiagonal matrix.

    ``sub[i]`` is entry (i+1, i), ``diag[i]`` is (i, i), ``sup[i]`` is (i, i+1).
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.diag)
        if n < 1:
            raise ValueError("tridiagonal matrix must have order >= 1")
        if len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValueError(f"band lengths {len(self.sub)}, {n}, {len(self.sup)} are inconsistent")
        for band in (self.sub, self.diag, self.sup):
            if not np.all(np.isfinite(band)):
                raise ValueError("tridiagonal matrix entries must be finite")

    @classmethod
    def from_bands(cls, sub: Sequence[float], diag: Sequence[float], sup: Sequence[float]) -> TridiagonalMatrix:
        return cls(
            sub=np.asarray(sub, dtype=float),
            diag=np.asarray(diag, dtype=float),
            sup=np.asarray(sup, dtype=float),
        )

    @classmethod
    def identity(cls, n: int) -> TridiagonalMatrix:
        return cls.from_bands(np.zeros(n - 1), np.ones(n), np.zeros(n - 1))

    @property
    def n(self) -> int:
        return len(self.diag)

    def transpose(self) -> TridiagonalMatrix:
        return TridiagonalMatrix(sub=self.sup, diag=self.diag, sup=self.sub)

    def combine(self, other: TridiagonalMatrix, weight: float) -> TridiagonalMatrix:
        """Return ``self + weight * other``."""
        if other.n != self.n:
            raise ValueError(f"order mismatch: {self.n} vs {other.n}")
        return TridiagonalMatrix(
            sub=self.sub + weight * other.sub,
            diag=self.diag + weight * other.diag,
            sup=self.sup + weight * other.sup,
        )

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub * x[:-1]
        y[:-1] += self.sup * x[1:]
        return y

    def banded(self) -> np.ndarray:
        """(3, n) array in the layout of ``scipy.linalg.solve_banded((1, 1), ...)``."""
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.sup
        ab[1, :] = self.diag
        ab[2, :-1] = self.sub
        return ab

    def abs_row_sums(self) -> np.ndarray:
        sums = np.abs(self.diag).copy()
        sums[1:] += np.abs(self.sub)
        sums[:-1] += np.abs(self.sup)
        return sums

    def abs_col_sums(self) -> np.ndarray:
        return self.transpose().abs_row_sums()

    def weak_rows(self) -> np.ndarray:
        """Row indices where |diag| does not strictly exceed the off-diagonal absolute sum."""
        off = self.abs_row_sums() - np.abs(self.diag)
        return np.flatnonzero(np.abs(self.diag) <= off)


class TridiagonalLU:
    """Thomas factorization of a tridiagonal matrix, reusable across right-hand sides."""

    def __init__(self, A: TridiagonalMatrix):
        n = A.n
        self.n = n
        self.sub = A.sub
        self.pivots = np.empty(n)
        self.upper = np.empty(max(n - 1, 0))

        pivot = A.diag[0]
        if abs(pivot) < PIVOT_FLOOR:
            raise ZeroPivotError(0)
        self.pivots[0] = pivot
        for i in range(1, n):
            self.upper[i - 1] = A.sup[i - 1] / self.pivots[i - 1]
            pivot = A.diag[i] - A.sub[i - 1] * self.upper[i - 1]
            if abs(pivot) < PIVOT_FLOOR or not np.isfinite(pivot):
                raise ZeroPivotError(i)
            self.pivots[i] = pivot

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise ValueError(f"right-hand side has shape {rhs.shape}, expected ({self.n},)")
        y = np.empty(self.n)
        y[0] = rhs[0] / self.pivots[0]
        for i in range(1, self.n):
            y[i] = (rhs[i] - self.sub[i - 1] * y[i - 1]) / self.pivots[i]
        for i in range(self.n - 2, -1, -1):
            y[i] -= self.upper[i] * y[i + 1]
        return y


def thomas_solve(A: TridiagonalMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve ``A x = rhs`` by the Thomas algorithm (no pivoting).

    Raises:
        ZeroPivotError: naming the row where elimination broke down.
    """
    return TridiagonalLU(A).solve(rhs)


def dense_from_tridiagonal(A: TridiagonalMatrix) -> DenseMatrix:
    return np.diag(A.diag) + np.diag(A.sub, -1) + np.diag(A.sup, 1)


def dense_solve(A: DenseMatrix, B: DenseMatrix) -> DenseMatrix:
    """Solve ``A X = B`` with LU and partial pivoting.

    Raises:
        SingularMatrixError: if a pivot falls below 1e-300 in magnitude.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A)
    smallest = np.min(np.abs(np.diag(lu)))
    if smallest < PIVOT_FLOOR:
        raise SingularMatrixError(f"matrix of order {A.shape[0]} is singular (pivot {smallest:.3e})")
    X = scipy.linalg.lu_solve((lu, piv), B)
    logger.debug("dense_solve order=%d residual=%.3e", A.shape[0], residual_norm(A, X, B))
    return X


def residual_norm(A: DenseMatrix, X: DenseMatrix, B: DenseMatrix) -> float:
    """Max-norm of ``A X - B``."""
    return float(np.max(np.abs(A @ X - B), initial=0.0))


def eigenvalues_dense(A: DenseMatrix, tol: float = EIGEN_RESIDUAL_TOLERANCE) -> ComplexList:
    """All eigenvalues of a real square matrix (LAPACK balancing + Hessenberg QR).

    Every eigenvalue is checked against ``tol`` with `verify_eigenpairs`;
    failures are logged, not raised.

    Raises:
        ConvergenceFailure: if the QR iteration does not converge.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    try:
        values, vectors = scipy.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    verify_eigenpairs(A, values, vectors, tol)
    return np.asarray(values, dtype=complex)


def verify_eigenpairs(
    A: DenseMatrix, values: ComplexList, vectors: np.ndarray, tol: float = EIGEN_RESIDUAL_TOLERANCE
) -> np.ndarray:
    """Per-eigenvalue ``||A v - lambda v|| / (||v|| ||A||_2)``, columns of ``vectors`` being the v.

    Each entry bounds ``sigma_min(A - lambda I) / ||A||_2`` from above.
    """
    A = np.asarray(A, dtype=float)
    vectors = np.asarray(vectors, dtype=complex)
    if A.size == 0:
        return np.zeros(0)
    scale = max(float(scipy.linalg.norm(A, 2)), np.finfo(float).tiny)
    residuals = np.linalg.norm(A @ vectors - vectors * np.asarray(values)[None, :], axis=0)
    residuals /= np.linalg.norm(vectors, axis=0) * scale
    if np.any(residuals > tol):
        logger.warning("eigenvalue residual %.3e exceeds %.1e", residuals.max(), tol)
    return residuals


def _power_iteration(apply, n: int, what: str) -> tuple[float, int]:
    """Largest eigenvalue of a symmetric positive semi-definite operator."""
    x = np.ones(n) / np.sqrt(n)
    estimate = 0.0
    for iteration in range(1, POWER_MAX_ITERATIONS + 1):
        y = apply(x)
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0, iteration
        x = y / norm
        if abs(norm - estimate) <= POWER_TOLERANCE * norm:
            logger.debug("%s converged after %d iterations", what, iteration)
            return norm, iteration
        estimate = norm
    raise ConvergenceFailure(f"{what} did not converge", partial=estimate, iterations=POWER_MAX_ITERATIONS)


def _gram_upper_band(A: TridiagonalMatrix) -> np.ndarray:
    """Upper band storage of A Aᵀ for ``scipy.linalg.eigvals_banded``."""
    d0, d1, d2 = gram_bands(A)
    band = np.zeros((3, A.n))
    band[2, :] = d0
    band[1, 1:] = d1
    band[0, 2:] = d2
    return band


def gram_bands(A: TridiagonalMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonal, first and second super-diagonals of the pentadiagonal A Aᵀ."""
    d0 = A.diag**2
    d0[1:] += A.sub**2
    d0[:-1] += A.sup**2
    d1 = A.diag[:-1] * A.sub + A.sup * A.diag[1:]
    d2 = A.sup[:-1] * A.sub[1:]
    return d0, d1, d2


def _gram_extreme_eigenvalue(A: TridiagonalMatrix, which: Literal["min", "max"]) -> float:
    if A.n <= 3:
        sigma = scipy.linalg.svdvals(dense_from_tridiagonal(A))
        return float((sigma[-1] if which == "min" else sigma[0]) ** 2)
    index = 0 if which == "min" else A.n - 1
    values = scipy.linalg.eigvals_banded(
        _gram_upper_band(A), lower=False, select="i", select_range=(index, index)
    )
    return max(float(values[0]), 0.0)


def spectral_norm(A: DenseMatrix | TridiagonalMatrix) -> float:
    """Largest singular value by power iteration on AᵀA from the normalized all-ones vector."""
    if isinstance(A, TridiagonalMatrix):
        At = A.transpose()
        value, _ = _power_iteration(lambda x: At.matvec(A.matvec(x)), A.n, "spectral_norm")
    else:
        A = np.asarray(A, dtype=float)
        value, _ = _power_iteration(lambda x: A.T @ (A @ x), A.shape[1], "spectral_norm")
    return float(np.sqrt(value))


def max_singular_value(A: TridiagonalMatrix, method: NormMethod = "banded") -> float:
    if method == "iteration":
        return spectral_norm(A)
    return float(np.sqrt(_gram_extreme_eigenvalue(A, "max")))


def min_singular_value(A: TridiagonalMatrix, method: NormMethod = "iteration") -> float:
    """Smallest singular value of a tridiagonal matrix.

    ``"iteration"`` runs inverse power iteration with one solve by Aᵀ and one
    by A per step; ``"banded"`` takes the smallest eigenvalue of the
    pentadiagonal Gram matrix from LAPACK.

    Raises:
        ZeroPivotError: if A is singular for the Thomas factorization.
        ConvergenceFailure: if the iteration cap is reached.
    """
    if method == "banded":
        return float(np.sqrt(_gram_extreme_eigenvalue(A, "min")))

    lu = TridiagonalLU(A)
    lu_t = TridiagonalLU(A.transpose())
    inverse_gram_max, _ = _power_iteration(lambda x: lu.solve(lu_t.solve(x)), A.n, "min_singular_value")
    if inverse_gram_max == 0.0:
        raise SingularMatrixError("inverse iteration collapsed to zero")
    return float(1.0 / np.sqrt(inverse_gram_max))


def pencil_operator(X: TridiagonalMatrix, Y: TridiagonalMatrix) -> DenseMatrix:
    """Dense W = X⁻¹Y.

    Raises:
        DenseLimitError: above ``MAX_DENSE_ORDER``.
    """
    if X.n > MAX_DENSE_ORDER:
        logger.warning("refusing dense order %d > %d", X.n, MAX_DENSE_ORDER)
        raise DenseLimitError(f"order {X.n} exceeds the dense limit {MAX_DENSE_ORDER}")
    return dense_solve(dense_from_tridiagonal(X), dense_from_tridiagonal(Y))
