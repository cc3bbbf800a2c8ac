"""
Refinement ladders against exact solutions and observed orders of accuracy.

Two reference problems are built in:
    - constant coefficients a = b = c with u = exp(k z + c (k^2 - k) v),
      refined in space with delta_v proportional to delta_z^2;
    - a = z + 1, b = (z + 1)^2 with u = (z + 1) exp(-v), which the scheme
      resolves exactly in space, refined in time at fixed N.

The growth check uses a third problem with no exact solution: a hump
initial datum driven by oscillating boundary data.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd
from scipy import stats

from src.compact.discretization import GridSpec, ProblemSpec
from src.compact.exprparse import evaluate_many
from src.compact.timestepper import SolutionHistory, solve_ibvp

logger = logging.getLogger(__name__)

ExactSolution = Callable[[float, np.ndarray], np.ndarray]


def observed_orders(errors: Sequence[float], ratio: float = 2.0) -> list[float]:
    """log_ratio(e_i / e_{i+1}) for each consecutive pair."""
    return [math.log(errors[i] / errors[i + 1]) / math.log(ratio) for i in range(len(errors) - 1)]


def fitted_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(step)."""
    fit = stats.linregress(np.log(steps), np.log(errors))
    return float(fit.slope)


def max_error(history: SolutionHistory, exact: ExactSolution) -> float:
    """Max-norm error over interior nodes at the final time."""
    grid = history.grid
    z = grid.nodes()[1:-1]
    return float(np.max(np.abs(history.final - exact(grid.time(grid.M), z))))


@dataclass
class ConvergenceStudy:
    """One row per refinement level: N, M, delta_z, delta_v, error, order."""

    kind: str
    theta: float
    rows: pd.DataFrame

    @property
    def orders(self) -> list[float]:
        return [float(x) for x in self.rows["order"].iloc[1:]]

    @property
    def fitted(self) -> float:
        step = self.rows["delta_z"] if self.kind == "spatial" else self.rows["delta_v"]
        return fitted_order(step.to_list(), self.rows["error"].to_list())


def _study(kind: str, spec: ProblemSpec, grids: list[GridSpec], exact: ExactSolution) -> ConvergenceStudy:
    records = []
    for grid in grids:
        error = max_error(solve_ibvp(spec, grid), exact)
        logger.debug("%s ladder N=%d M=%d error=%.3e", kind, grid.N, grid.M, error)
        records.append(
            {"N": grid.N, "M": grid.M, "delta_z": grid.delta_z, "delta_v": grid.delta_v, "error": error}
        )
    rows = pd.DataFrame(records)
    ratio_source = rows["delta_z"] if kind == "spatial" else rows["delta_v"]
    orders = [float("nan")]
    for i in range(1, len(rows)):
        ratio = ratio_source.iloc[i - 1] / ratio_source.iloc[i]
        orders.extend(observed_orders([rows["error"].iloc[i - 1], rows["error"].iloc[i]], ratio))
    rows["order"] = orders
    return ConvergenceStudy(kind=kind, theta=grids[0].theta, rows=rows)


def exponential_problem(c: float, k: float, T: float) -> tuple[ProblemSpec, ExactSolution]:
    """Constant-coefficient problem on [0, 1] with exact solution exp(k z + c (k^2 - k) v)."""
    rate = c * (k * k - k)
    spec = ProblemSpec.from_text(
        a=repr(c),
        b=repr(c),
        k=f"exp(({k!r})*z)",
        h1=f"exp(({rate!r})*v)",
        h2=f"exp(({k!r})+({rate!r})*v)",
        T=T,
    )
    return spec, lambda v, z: np.exp(k * z + rate * v)


def decaying_linear_problem(T: float = 1.0) -> tuple[ProblemSpec, ExactSolution]:
    """a = z + 1, b = (z + 1)^2 on [0, 1] with exact solution (z + 1) exp(-v)."""
    spec = ProblemSpec.from_text(a="z+1", b="(z+1)^2", k="z+1", h1="exp(-v)", h2="2*exp(-v)", T=T)
    return spec, lambda v, z: (z + 1) * np.exp(-v)


def spatial_ladder(
    c: float = 1.0,
    k: float = 1.3,
    Ns: Sequence[int] = (8, 16, 32, 64),
    steps_per_n2: int = 1,
    T: float = 0.25,
    theta: float = 0.5,
) -> ConvergenceStudy:
    """Refine in space with M = steps_per_n2 * N^2, so delta_v / delta_z^2 stays fixed."""
    spec, exact = exponential_problem(c, k, T)
    grids = [GridSpec.build(spec, N=N, M=steps_per_n2 * N * N, theta=theta) for N in Ns]
    return _study("spatial", spec, grids, exact)


def temporal_ladder(
    Ms: Sequence[int] = (10, 20, 40, 80),
    N: int = 64,
    theta: float = 1.0,
    T: float = 1.0,
) -> ConvergenceStudy:
    spec, exact = decaying_linear_problem(T)
    grids = [GridSpec.build(spec, N=N, M=M, theta=theta) for M in Ms]
    return _study("temporal", spec, grids, exact)


def growth_excess(history: SolutionHistory) -> float:
    """max_m ||U^m||_inf minus (||U^0||_inf + largest boundary magnitude); <= 0 means bounded."""
    grid, spec = history.grid, history.spec
    times = [grid.time(m) for m in range(grid.M + 1)]
    boundary = max(
        float(np.max(np.abs(evaluate_many(spec.h1, times)))),
        float(np.max(np.abs(evaluate_many(spec.h2, times)))),
    )
    norms = history.max_norms()
    return float(np.max(norms) - norms[0] - boundary)


def forced_oscillation_problem(T: float = 1.0) -> ProblemSpec:
    """a = z + 1, b = (z + 1)^2 on [0, 1]: a hump k = 1 + sin(pi z) driven by h1 = cos(v), h2 = cos(2v)."""
    return ProblemSpec.from_text(a="z+1", b="(z+1)^2", k="1+sin(pi*z)", h1="cos(v)", h2="cos(2*v)", T=T)


def bounded_growth_run(N: int, M: int, theta: float, mesh_ratio: float | None = None) -> float:
    """growth_excess for the forced oscillation data; ``mesh_ratio`` fixes delta_v = d delta_z^2, else T = 1."""
    T = 1.0 if mesh_ratio is None else M * mesh_ratio / N**2
    spec = forced_oscillation_problem(T)
    return growth_excess(solve_ibvp(spec, GridSpec.build(spec, N=N, M=M, theta=theta)))
