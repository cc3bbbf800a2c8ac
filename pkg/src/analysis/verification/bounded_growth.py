"""Solution norms stay bounded by the data over long runs."""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import pandas as pd

from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.parallel import run_cells
from src.compact.convergence import bounded_growth_run

GROWTH_TOLERANCE = 1e-8


def _excess(cell: tuple[int, int, float, float | None]) -> float:
    N, M, theta, mesh_ratio = cell
    return bounded_growth_run(N, M, theta, mesh_ratio)


class BoundedGrowthAnalysis(Analysis):
    """||U^m||_inf against ||U^0||_inf plus the boundary magnitude on the reference coefficients."""

    def __init__(
        self,
        N: int = 100,
        M: int = 1000,
        mesh_ratios: Sequence[float] = (0.1, 1.0, 10.0, 100.0),
        ratio_N: int = 20,
        max_workers: int = 4,
    ):
        super().__init__(
            name="bounded_growth",
            description="Largest growth of the discrete max-norm beyond the data bound",
        )
        thetas = (1.0, 0.5)
        self.cells = [(N, M, theta, None) for theta in thetas]
        self.cells += [(ratio_N, M, theta, d) for d, theta in itertools.product(mesh_ratios, thetas)]
        self.max_workers = max_workers

    def run(self) -> AnalysisOutput:
        excess = run_cells(_excess, self.cells, "Marching", self.max_workers)
        df = pd.DataFrame(
            [
                {"N": N, "M": M, "theta": theta, "mesh_ratio": d, "excess": e, "bounded": e <= GROWTH_TOLERANCE}
                for (N, M, theta, d), e in zip(self.cells, excess)
            ]
        )
        return AnalysisOutput(data=df, metadata={"tolerance": GROWTH_TOLERANCE})
