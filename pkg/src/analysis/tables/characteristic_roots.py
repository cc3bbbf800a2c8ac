"""Roots of D1_N and their symbolic A/B/C expansion for small N."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import pandas as pd

from src.analysis.tables.util.parameters import (
    REFERENCE_A,
    REFERENCE_B,
    ROOT_SWEEP_DV,
    ROOT_SWEEP_NS,
    reference_stencil,
)
from src.common.analysis import Analysis, AnalysisOutput
from src.common.util.strings import format_fixed
from src.compact.charpoly import SYMBOLIC_LIMIT, characteristic_roots, format_symbolic, symbolic_D1


class CharacteristicRootsAnalysis(Analysis):
    """Expressions and roots of D1_N for the reference coefficients at delta_v = 0.1."""

    def __init__(self, Ns: Sequence[int] = ROOT_SWEEP_NS, delta_v: float = ROOT_SWEEP_DV):
        super().__init__(
            name="characteristic_roots",
            description="Symbolic form and roots of the characteristic polynomial D1_N",
        )
        self.Ns = tuple(Ns)
        self.delta_v = delta_v

    def run(self) -> AnalysisOutput:
        records = []
        with self.progress("Solving characteristic polynomials"):
            for N in self.Ns:
                expression = format_symbolic(symbolic_D1(N)) if N <= SYMBOLIC_LIMIT else ""
                roots = characteristic_roots(reference_stencil(N, delta_v=self.delta_v))
                for index, root in enumerate(roots, start=1):
                    records.append(
                        {
                            "N": N,
                            "expression": expression,
                            "root_index": index,
                            "root": float(root.real),
                            "root_imag": float(root.imag),
                        }
                    )

        df = pd.DataFrame(records)
        display = df[["N", "expression", "root"]].copy()
        display["root"] = [format_fixed(x, 4) for x in df["root"]]
        if np.any(df["root_imag"] != 0):
            display["root_imag"] = [format_fixed(x, 4) for x in df["root_imag"]]

        return AnalysisOutput(
            data=df,
            display=display,
            metadata={"delta_v": self.delta_v, "a": REFERENCE_A, "b": REFERENCE_B, "Ns": list(self.Ns)},
        )
