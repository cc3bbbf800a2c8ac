"""Reference parameter sets: a(z) = z + 1, b(z) = (z + 1)^2 on [0, 1] with T = 1."""

from __future__ import annotations

from dataclasses import dataclass

from src.common.interfaces.report import NormReport
from src.compact.conditioning import norm_report
from src.compact.discretization import GridSpec, ProblemSpec, StencilCoefficients, build_stencil

REFERENCE_A = "z+1"
REFERENCE_B = "(z+1)^2"

ROOT_SWEEP_NS = tuple(range(2, 9))
ROOT_SWEEP_DV = 0.1

# delta_v / delta_z^2 = 25/32 along the ladder
CONDITIONING_LADDER = ((25, 800), (50, 3200), (100, 12800), (200, 51200), (400, 204800), (800, 819200))


@dataclass(frozen=True)
class Cell:
    """One (N, M) grid of a table sweep."""

    N: int
    M: int

    def __str__(self) -> str:
        return f"N={self.N},M={self.M}"


def reference_spec() -> ProblemSpec:
    return ProblemSpec.from_text(a=REFERENCE_A, b=REFERENCE_B)


def reference_stencil(N: int, M: int | None = None, delta_v: float | None = None) -> StencilCoefficients:
    spec = reference_spec()
    return build_stencil(spec, GridSpec.build(spec, N=N, M=M, delta_v=delta_v))


def ladder_cells(ladder: tuple[tuple[int, int], ...] = CONDITIONING_LADDER) -> list[Cell]:
    return [Cell(N, M) for N, M in ladder]


def cell_norms(cell: Cell) -> NormReport:
    return norm_report(reference_stencil(cell.N, M=cell.M))
