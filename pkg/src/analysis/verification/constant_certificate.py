"""Unconditional-stability certificate swept over constant-coefficient problems."""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import pandas as pd

from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.parallel import run_cells
from src.compact.constantcase import constant_problem_from_ratio, phi_zero_eigenvalue, stability_certificate

SWEEP_C = (0.1, 1.0, 10.0)
SWEEP_D = (0.01, 0.1, 1.0, 10.0, 100.0)
SWEEP_N = (4, 16, 64)


def _certify(cell: tuple[float, float, int, float]) -> dict:
    c, d, N, theta = cell
    cp = constant_problem_from_ratio(c, N, d)
    report = stability_certificate(cp, theta)
    return {
        "c": c,
        "d": d,
        "N": N,
        "theta": theta,
        "verdict": report.verdict.value,
        "min_real_part": report.min_real_part,
        "spectral_radius": report.spectral_radius,
        "phi_zero": phi_zero_eigenvalue(cp),
        "failed_k": ";".join(str(k) for k in report.failed_k),
    }


class ConstantCertificateAnalysis(Analysis):
    def __init__(
        self,
        cs: Sequence[float] = SWEEP_C,
        ds: Sequence[float] = SWEEP_D,
        Ns: Sequence[int] = SWEEP_N,
        max_workers: int = 4,
    ):
        super().__init__(
            name="constant_certificate",
            description="Sign-check certificate of stability for constant coefficients",
        )
        self.cells = list(itertools.product(cs, ds, Ns, (1.0, 0.5)))
        self.max_workers = max_workers

    def run(self) -> AnalysisOutput:
        rows = run_cells(_certify, self.cells, "Certifying constant problems", self.max_workers)
        df = pd.DataFrame(rows)
        return AnalysisOutput(
            data=df,
            metadata={"cells": len(df), "certified": int((df["verdict"] == "stable").sum())},
        )
