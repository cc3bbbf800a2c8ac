"""
Norm bounds for X^-1 and Y, and the condition number of I + W.

||X^-1||_2 is bounded through Gershgorin discs of the pentadiagonal Gram
matrix P = X X^T; ||Y||_2 through sqrt(||Y||_inf ||Y||_1). Exact values
come from the singular values of X, Y and I + W.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from src.common.interfaces.report import ConditionReport, NormReport
from src.compact.discretization import VALID_THETAS, StencilCoefficients
from src.compact.errors import BoundUnavailableError, ProblemSpecError
from src.compact.linalg import (
    DenseMatrix,
    NormMethod,
    TridiagonalMatrix,
    gram_bands,
    max_singular_value,
    min_singular_value,
    pencil_operator,
)
from src.compact.timestepper import scheme_x, scheme_y

logger = logging.getLogger(__name__)

DOMINANCE_SLACK = 1e-12
KAPPA_SLACK = 1e-9


def gram_matrix(X: TridiagonalMatrix) -> DenseMatrix:
    """Dense P = X X^T (symmetric, pentadiagonal)."""
    d0, d1, d2 = gram_bands(X)
    return np.diag(d0) + np.diag(d1, 1) + np.diag(d1, -1) + np.diag(d2, 2) + np.diag(d2, -2)


def _disc_gaps(st: StencilCoefficients) -> np.ndarray:
    """g_l - s_l for every row l of P, with p_1 = r_{N-1} = 0 and zeros outside 1..N-1."""
    size = st.N - 1
    p = np.abs(st.p).copy()
    r = np.abs(st.r).copy()
    q = np.abs(st.q)
    p[0] = 0.0
    r[-1] = 0.0

    # two zeros of padding on each side: index l + 1 holds row l
    P_, Q_, R_ = (np.pad(x, 2) for x in (p, q, r))
    idx = np.arange(2, size + 2)

    g = P_[idx] ** 2 + Q_[idx] ** 2 + R_[idx] ** 2
    s = (
        P_[idx] * (Q_[idx - 1] + R_[idx - 2])
        + Q_[idx] * (P_[idx + 1] + R_[idx - 1])
        + R_[idx] * (P_[idx + 2] + Q_[idx + 1])
    )
    return g - s


def gershgorin_xinv_bound(st: StencilCoefficients) -> float:
    """(min_l (g_l - s_l))^(-1/2), an upper bound on ||X^-1||_2.

    Raises:
        BoundUnavailableError: if some disc reaches zero.
    """
    gaps = _disc_gaps(st)
    smallest = float(np.min(gaps))
    if smallest <= 0:
        row = int(np.argmin(gaps)) + 1
        raise BoundUnavailableError(f"Gershgorin disc of row {row} reaches zero (gap {smallest:.6g})")
    return smallest**-0.5


def y_norm_bounds(st: StencilCoefficients) -> tuple[float, float, float]:
    """(||Y||_inf, ||Y||_1, sqrt of their product)."""
    Y = scheme_y(st)
    y_inf = float(np.max(Y.abs_row_sums()))
    y_one = float(np.max(Y.abs_col_sums()))
    return y_inf, y_one, float(np.sqrt(y_inf * y_one))


def norm_report(st: StencilCoefficients, method: NormMethod = "banded") -> NormReport:
    X, Y = scheme_x(st), scheme_y(st)
    try:
        xinv_bound = gershgorin_xinv_bound(st)
    except BoundUnavailableError as exc:
        logger.warning("%s", exc)
        xinv_bound = float("nan")

    xinv_exact = 1.0 / min_singular_value(X, method)
    y_inf, y_one, y2_bound = y_norm_bounds(st)
    y2_exact = max_singular_value(Y, method)

    if xinv_exact > xinv_bound * (1 + DOMINANCE_SLACK):
        logger.warning("||X^-1||_2 = %.6g exceeds its bound %.6g", xinv_exact, xinv_bound)
    if y2_exact > y2_bound * (1 + DOMINANCE_SLACK):
        logger.warning("||Y||_2 = %.6g exceeds its bound %.6g", y2_exact, y2_bound)

    return NormReport(
        xinv_bound=xinv_bound,
        xinv_exact=xinv_exact,
        y_inf=y_inf,
        y_one=y_one,
        y2_bound=y2_bound,
        y2_exact=y2_exact,
    )


def condition_number(matrix: DenseMatrix) -> float:
    sigma = scipy.linalg.svdvals(matrix)
    return float(sigma[0] / sigma[-1])


def condition_report(st: StencilCoefficients, theta: float, method: NormMethod = "banded") -> ConditionReport:
    """kappa(I + theta W) against the bound 1 + theta ||X^-1||_2 ||Y||_2 (bounded)."""
    if theta not in VALID_THETAS:
        raise ProblemSpecError(f"theta must be 1 or 1/2, got {theta}")
    norm = norm_report(st, method)
    kappa_bound = 1 + norm.xinv_bound * norm.y2_bound * theta

    W = pencil_operator(scheme_x(st), scheme_y(st))
    kappa_exact = condition_number(np.eye(W.shape[0]) + theta * W)
    if kappa_exact > kappa_bound * (1 + KAPPA_SLACK):
        logger.warning("kappa = %.6g exceeds its bound %.6g", kappa_exact, kappa_bound)

    return ConditionReport(norm=norm, theta=theta, kappa_bound=kappa_bound, kappa_exact=kappa_exact)
