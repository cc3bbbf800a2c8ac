"""Row-sum, column-sum and 2-norm of Y along the conditioning ladder."""

from __future__ import annotations

import pandas as pd

from src.analysis.tables.util.parameters import CONDITIONING_LADDER, cell_norms, ladder_cells
from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.parallel import run_cells
from src.common.util.strings import format_fixed

COLUMNS = ("y_inf", "y_one", "y2_bound", "y2_exact")


class YNormsAnalysis(Analysis):
    def __init__(self, ladder: tuple[tuple[int, int], ...] = CONDITIONING_LADDER, max_workers: int = 4):
        super().__init__(
            name="y_norms",
            description="Infinity-, one- and 2-norm of Y with the sqrt(inf * one) bound",
        )
        self.ladder = ladder
        self.max_workers = max_workers

    def run(self) -> AnalysisOutput:
        cells = ladder_cells(self.ladder)
        reports = run_cells(cell_norms, cells, "Bounding ||Y||", self.max_workers)

        df = pd.DataFrame(
            [{"N": c.N, "M": c.M, **{k: getattr(r, k) for k in COLUMNS}} for c, r in zip(cells, reports)]
        )
        display = df.copy()
        for column in COLUMNS:
            display[column] = [format_fixed(x, 2) for x in df[column]]

        return AnalysisOutput(data=df, display=display, metadata={"ladder": [list(x) for x in self.ladder]})
