"""
Fully discrete theta-scheme: assembly of X, Y and time marching.

    [X + theta Y] U^{m+1} = [X - (1 - theta) Y] U^m + F^m

theta = 1 is backward Euler, theta = 1/2 is Crank-Nicolson.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.compact.discretization import (
    VALID_THETAS,
    GridSpec,
    PRForm,
    ProblemSpec,
    StencilCoefficients,
    build_stencil,
)
from src.compact.errors import CompactSchemeError, ProblemSpecError, SolverError
from src.compact.exprparse import evaluate, evaluate_many
from src.compact.linalg import TridiagonalLU, TridiagonalMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemeMatrices:
    X: TridiagonalMatrix
    Y: TridiagonalMatrix
    theta: float
    lhs: TridiagonalMatrix
    rhs_mat: TridiagonalMatrix

    def factor(self) -> TridiagonalLU:
        return TridiagonalLU(self.lhs)


def scheme_x(st: StencilCoefficients) -> TridiagonalMatrix:
    """X: sub = p_2..p_{N-1}, diag = q, sup = r_1..r_{N-2}."""
    return TridiagonalMatrix(sub=st.p[1:], diag=st.q, sup=st.r[:-1])


def scheme_y(st: StencilCoefficients) -> TridiagonalMatrix:
    """Y: sub = l_2..l_{N-1}, diag = m, sup = n_1..n_{N-2}."""
    return TridiagonalMatrix(sub=st.l[1:], diag=st.m, sup=st.n[:-1])


def assemble_matrices(st: StencilCoefficients, theta: float) -> SchemeMatrices:
    if theta not in VALID_THETAS:
        raise ProblemSpecError(f"theta must be 1 or 1/2, got {theta}")
    X = scheme_x(st)
    Y = scheme_y(st)
    return SchemeMatrices(
        X=X,
        Y=Y,
        theta=theta,
        lhs=X.combine(Y, theta),
        rhs_mat=X.combine(Y, -(1 - theta)),
    )


def boundary_vector(
    spec: ProblemSpec,
    st: StencilCoefficients,
    grid: GridSpec,
    m: int,
    theta: float,
) -> np.ndarray:
    """Boundary forcing F^m for the step from level m to m+1.

    Only the first and last entries are non-zero:
        (p_1 - (1-theta) l_1) h1(v^m) - (p_1 + theta l_1) h1(v^{m+1})
        (r_{N-1} - (1-theta) n_{N-1}) h2(v^m) - (r_{N-1} + theta n_{N-1}) h2(v^{m+1})
    """
    v_now, v_next = grid.time(m), grid.time(m + 1)
    p1, l1 = st.p[0], st.l[0]
    r_last, n_last = st.r[-1], st.n[-1]

    F = np.zeros(st.N - 1)
    F[0] += (p1 - (1 - theta) * l1) * evaluate(spec.h1, v_now) - (p1 + theta * l1) * evaluate(spec.h1, v_next)
    F[-1] += (r_last - (1 - theta) * n_last) * evaluate(spec.h2, v_now) - (r_last + theta * n_last) * evaluate(
        spec.h2, v_next
    )
    return F


def advance_step(
    sm: SchemeMatrices,
    U: np.ndarray,
    F: np.ndarray,
    lu: TridiagonalLU | None = None,
) -> np.ndarray:
    """One step: solve lhs U' = rhs_mat U + F. Pass ``lu`` to reuse a factorization."""
    if lu is None:
        lu = sm.factor()
    return lu.solve(sm.rhs_mat.matvec(U) + F)


@dataclass(frozen=True)
class SolutionHistory:
    """Interior values of every time level; ``levels[m]`` is U^m."""

    levels: np.ndarray
    grid: GridSpec
    spec: ProblemSpec

    @property
    def final(self) -> np.ndarray:
        return self.levels[-1]

    def profile(self, m: int) -> pd.DataFrame:
        """Full nodal profile at level m, boundary values included."""
        if not 0 <= m < len(self.levels):
            raise IndexError(f"time level {m} outside 0..{len(self.levels) - 1}")
        v = self.grid.time(m)
        u = np.concatenate(([evaluate(self.spec.h1, v)], self.levels[m], [evaluate(self.spec.h2, v)]))
        return pd.DataFrame({"z": self.grid.nodes(), "u": u})

    def max_norms(self) -> np.ndarray:
        return np.max(np.abs(self.levels), axis=1)


def initial_level(spec: ProblemSpec, grid: GridSpec) -> np.ndarray:
    return evaluate_many(spec.k, grid.nodes()[1:-1])


def solve_ibvp(
    spec: ProblemSpec,
    grid: GridSpec,
    pr_form: PRForm = PRForm.DERIVED,
) -> SolutionHistory:
    """March from the sampled initial datum through all M levels.

    Raises:
        SolverError: carrying the time level at which marching failed.
    """
    st = build_stencil(spec, grid, pr_form)
    sm = assemble_matrices(st, grid.theta)
    try:
        lu = sm.factor()
    except CompactSchemeError as exc:
        raise SolverError(f"cannot factor X + theta Y: {exc}", level=0) from exc

    levels = np.empty((grid.M + 1, grid.N - 1))
    levels[0] = initial_level(spec, grid)
    for m in range(grid.M):
        try:
            F = boundary_vector(spec, st, grid, m, grid.theta)
            levels[m + 1] = advance_step(sm, levels[m], F, lu)
        except CompactSchemeError as exc:
            raise SolverError(str(exc), level=m + 1) from exc
        if not np.all(np.isfinite(levels[m + 1])):
            raise SolverError("non-finite solution values", level=m + 1)

    logger.debug("solved N=%d M=%d theta=%s", grid.N, grid.M, grid.theta)
    return SolutionHistory(levels=levels, grid=grid, spec=spec)
