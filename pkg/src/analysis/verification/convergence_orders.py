"""Observed orders of accuracy on manufactured and exact solutions."""

from __future__ import annotations

from collections.abc import Sequence

import matplotlib.pyplot as plt
import pandas as pd

from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.strings import format_fixed, format_mantissa
from src.compact.convergence import ConvergenceStudy, spatial_ladder, temporal_ladder


class ConvergenceOrdersAnalysis(Analysis):
    """Spatial ladder under Crank-Nicolson and temporal ladders for both theta values."""

    def __init__(
        self,
        Ns: Sequence[int] = (8, 16, 32, 64),
        Ms: Sequence[int] = (10, 20, 40, 80),
        temporal_N: int = 64,
    ):
        super().__init__(
            name="convergence_orders",
            description="Observed spatial and temporal orders of accuracy",
        )
        self.Ns = tuple(Ns)
        self.Ms = tuple(Ms)
        self.temporal_N = temporal_N

    def studies(self) -> list[ConvergenceStudy]:
        with self.progress("Running refinement ladders"):
            return [
                spatial_ladder(Ns=self.Ns, theta=0.5),
                temporal_ladder(Ms=self.Ms, N=self.temporal_N, theta=1.0),
                temporal_ladder(Ms=self.Ms, N=self.temporal_N, theta=0.5),
            ]

    def run(self) -> AnalysisOutput:
        studies = self.studies()
        frames = [study.rows.assign(kind=study.kind, theta=study.theta) for study in studies]
        df = pd.concat(frames, ignore_index=True)[["kind", "theta", "N", "M", "delta_z", "delta_v", "error", "order"]]

        display = df.copy()
        display["error"] = [format_mantissa(x, digits=1, decimals=3) for x in df["error"]]
        display["order"] = ["" if pd.isna(x) else format_fixed(x, 2) for x in df["order"]]

        return AnalysisOutput(
            figure=self._create_figure(studies),
            data=df,
            display=display,
            metadata={"fitted_orders": {f"{s.kind}/theta={s.theta}": s.fitted for s in studies}},
        )

    def _create_figure(self, studies: list[ConvergenceStudy]) -> plt.Figure:
        fig, ax = plt.subplots(figsize=(8, 6))
        for study in studies:
            step = study.rows["delta_z"] if study.kind == "spatial" else study.rows["delta_v"]
            ax.loglog(step, study.rows["error"], marker="o", label=f"{study.kind}, theta={study.theta:g}")
        ax.set_xlabel("step size")
        ax.set_ylabel("max-norm error at final time")
        ax.set_title("Refinement ladders")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        plt.tight_layout()
        return fig
