"""Shared fixtures: the reference problem a = z + 1, b = (z + 1)^2 on [0, 1] and its grids."""

from __future__ import annotations

from collections.abc import Callable

import matplotlib
import numpy as np
import pytest

from src.compact.discretization import GridSpec, ProblemSpec, StencilCoefficients, build_stencil

# Use non-interactive backend for headless CI
matplotlib.use("Agg")


_REFERENCE_ROOTS = {
    2: [2.0600],
    3: [7.9419, 2.1218],
    4: [17.7303, 8.0194, 2.1423],
    5: [31.4791, 17.5329, 8.1618, 2.1491],
    6: [49.3158, 30.5320, 17.8975, 8.2353, 2.1517],
    7: [71.3459, 47.0817, 31.0721, 18.1722, 8.2712, 2.1528],
    8: [97.6417, 67.3382, 47.5424, 31.6907, 18.3334, 8.2896, 2.1534],
}


@pytest.fixture(scope="session")
def reference_roots() -> dict[int, list[float]]:
    """Roots of D1_N for the reference problem at delta_v = 0.1, largest first."""
    return _REFERENCE_ROOTS


@pytest.fixture(scope="session")
def reference_problem() -> ProblemSpec:
    return ProblemSpec.from_text(a="z+1", b="(z+1)^2")


@pytest.fixture(scope="session")
def reference_grid(reference_problem: ProblemSpec) -> Callable[..., GridSpec]:
    """Factory: ``reference_grid(N, M=None, delta_v=0.1, theta=1.0)``."""

    def build(N: int, M: int | None = None, delta_v: float | None = 0.1, theta: float = 1.0) -> GridSpec:
        if M is not None:
            delta_v = None
        return GridSpec.build(reference_problem, N=N, M=M, delta_v=delta_v, theta=theta)

    return build


@pytest.fixture(scope="session")
def reference_stencil(
    reference_problem: ProblemSpec, reference_grid: Callable[..., GridSpec]
) -> Callable[..., StencilCoefficients]:
    """Factory: ``reference_stencil(N, M=None, delta_v=0.1)``."""

    def build(N: int, M: int | None = None, delta_v: float | None = 0.1) -> StencilCoefficients:
        return build_stencil(reference_problem, reference_grid(N, M=M, delta_v=delta_v))

    return build


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
