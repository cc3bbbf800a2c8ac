"""Bound and exact value of the condition number of I + W along the conditioning ladder."""

from __future__ import annotations

import pandas as pd

from src.analysis.tables.util.parameters import CONDITIONING_LADDER, Cell, ladder_cells, reference_stencil
from src.common.analysis import Analysis, AnalysisOutput
from src.common.interfaces.report import ConditionReport
from src.common.util.parallel import run_cells
from src.common.util.strings import format_fixed
from src.compact.conditioning import condition_report


class ConditionNumbersAnalysis(Analysis):
    """kappa(I + W) for backward Euler, or kappa(I + W/2) with ``theta=0.5``."""

    def __init__(
        self,
        ladder: tuple[tuple[int, int], ...] = CONDITIONING_LADDER,
        theta: float = 1.0,
        max_workers: int = 2,
    ):
        super().__init__(
            name="condition_numbers",
            description="Upper bound and exact 2-norm condition number of I + W",
        )
        self.ladder = ladder
        self.theta = theta
        self.max_workers = max_workers

    def _cell(self, cell: Cell) -> ConditionReport:
        return condition_report(reference_stencil(cell.N, M=cell.M), self.theta)

    def run(self) -> AnalysisOutput:
        cells = ladder_cells(self.ladder)
        reports = run_cells(self._cell, cells, "Conditioning I + W", self.max_workers)

        df = pd.DataFrame(
            [
                {"N": c.N, "M": c.M, "kappa_bound": r.kappa_bound, "kappa_exact": r.kappa_exact}
                for c, r in zip(cells, reports)
            ]
        )
        display = df.copy()
        for column in ("kappa_bound", "kappa_exact"):
            display[column] = [format_fixed(x, 2) for x in df[column]]

        return AnalysisOutput(
            data=df,
            display=display,
            metadata={"theta": self.theta, "ladder": [list(x) for x in self.ladder]},
        )
