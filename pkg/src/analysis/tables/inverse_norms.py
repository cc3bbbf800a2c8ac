"""Gershgorin bound and exact value of ||X^-1||_2 along the conditioning ladder."""

from __future__ import annotations

import pandas as pd

from src.analysis.tables.util.parameters import CONDITIONING_LADDER, cell_norms, ladder_cells
from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.parallel import run_cells
from src.common.util.strings import format_mantissa


class InverseNormsAnalysis(Analysis):
    """Upper bound on ||X^-1||_2 from Gershgorin discs of X X^T against its exact value."""

    def __init__(self, ladder: tuple[tuple[int, int], ...] = CONDITIONING_LADDER, max_workers: int = 4):
        super().__init__(
            name="inverse_norms",
            description="Gershgorin bound and exact 2-norm of X^-1",
        )
        self.ladder = ladder
        self.max_workers = max_workers

    def run(self) -> AnalysisOutput:
        cells = ladder_cells(self.ladder)
        reports = run_cells(cell_norms, cells, "Bounding ||X^-1||", self.max_workers)

        df = pd.DataFrame(
            [
                {"N": c.N, "M": c.M, "xinv_bound": r.xinv_bound, "xinv_exact": r.xinv_exact}
                for c, r in zip(cells, reports)
            ]
        )
        display = df.copy()
        for column in ("xinv_bound", "xinv_exact"):
            display[column] = [format_mantissa(x) for x in df[column]]

        return AnalysisOutput(data=df, display=display, metadata={"ladder": [list(x) for x in self.ladder]})
