"""
Grid sampling of the coefficients and the compact stencil constants.

The equation is u_v + a(z) u_z - b(z) u_zz = 0 on [z_l, z_r] x [0, T]
with u(0, z) = k(z), u(v, z_l) = h1(v), u(v, z_r) = h2(v).

Usage:
    spec = ProblemSpec.from_text(a="z+1", b="(z+1)^2")
    grid = GridSpec.build(spec, N=8, delta_v=0.1)
    st = build_stencil(spec, grid)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.compact.errors import CoefficientError, ProblemSpecError
from src.compact.exprparse import ExpressionTree, evaluate, evaluate_many, parse, to_text
from src.compact.linalg import TridiagonalMatrix

logger = logging.getLogger(__name__)

VALID_THETAS = (1.0, 0.5)
COMPATIBILITY_TOLERANCE = 1e-12
HORIZON_TOLERANCE = 1e-9


class PRForm(str, Enum):
    """How the X stencil entries p, r are formed from gamma."""

    DERIVED = "derived"  # (2 + dz*gamma) / (24 dv)
    LISTING = "listing"  # (2 + dz) * gamma / (24 dv)


@dataclass(frozen=True)
class DerivativeExpressions:
    """Exact a', a'', b', b'' used in place of the central-difference surrogates."""

    da: ExpressionTree
    dda: ExpressionTree
    db: ExpressionTree
    ddb: ExpressionTree

    @classmethod
    def from_text(cls, da: str, dda: str, db: str, ddb: str) -> DerivativeExpressions:
        return cls(da=parse(da), dda=parse(dda), db=parse(db), ddb=parse(ddb))


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem: coefficients, data and domain."""

    a: ExpressionTree
    b: ExpressionTree
    k: ExpressionTree
    h1: ExpressionTree
    h2: ExpressionTree
    z_l: float = 0.0
    z_r: float = 1.0
    T: float = 1.0
    epsilon: float = 1e-8
    derivatives: DerivativeExpressions | None = None

    def __post_init__(self) -> None:
        if not self.z_l < self.z_r:
            raise ProblemSpecError(f"need z_l < z_r, got [{self.z_l}, {self.z_r}]")
        if not self.T > 0:
            raise ProblemSpecError(f"horizon T must be positive, got {self.T}")
        if not self.epsilon > 0:
            raise ProblemSpecError(f"epsilon must be positive, got {self.epsilon}")
        self._check_compatibility()

    def _check_compatibility(self) -> None:
        for name, boundary, z in (("h1", self.h1, self.z_l), ("h2", self.h2, self.z_r)):
            k_value = evaluate(self.k, z)
            h_value = evaluate(boundary, 0.0)
            if abs(h_value - k_value) > COMPATIBILITY_TOLERANCE * (1 + abs(k_value)):
                raise ProblemSpecError(f"{name}(0) = {h_value!r} but k({z}) = {k_value!r}")

    @classmethod
    def from_text(
        cls,
        a: str,
        b: str,
        k: str = "0",
        h1: str = "0",
        h2: str = "0",
        derivatives: DerivativeExpressions | None = None,
        **kwargs,
    ) -> ProblemSpec:
        return cls(
            a=parse(a, "z"),
            b=parse(b, "z"),
            k=parse(k, "z"),
            h1=parse(h1, "v"),
            h2=parse(h2, "v"),
            derivatives=derivatives,
            **kwargs,
        )

    def describe(self) -> dict[str, str]:
        return {name: to_text(getattr(self, name)) for name in ("a", "b", "k", "h1", "h2")}


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time grid. Node i sits at z_l + i*delta_z, level m at m*delta_v."""

    N: int
    M: int
    delta_z: float
    delta_v: float
    theta: float = 1.0
    z_l: float = 0.0

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ProblemSpecError(f"N must be at least 2, got {self.N}")
        if self.M < 0:
            raise ProblemSpecError(f"M must be non-negative, got {self.M}")
        if not (self.delta_z > 0 and self.delta_v > 0):
            raise ProblemSpecError("grid spacings must be positive")
        if self.theta not in VALID_THETAS:
            raise ProblemSpecError(f"theta must be 1 or 1/2, got {self.theta}")

    @classmethod
    def build(
        cls,
        spec: ProblemSpec,
        N: int,
        M: int | None = None,
        delta_v: float | None = None,
        theta: float = 1.0,
    ) -> GridSpec:
        """Grid over ``spec``'s domain. Give ``M`` (delta_v = T/M) or ``delta_v`` (M = round(T/delta_v))."""
        if M is None and delta_v is None:
            raise ProblemSpecError("either M or delta_v is required")
        if delta_v is None:
            if M < 1:
                raise ProblemSpecError(f"M must be at least 1 to derive delta_v, got {M}")
            delta_v = spec.T / M
        elif M is None:
            M = max(1, round(spec.T / delta_v))
            if abs(M * delta_v - spec.T) > HORIZON_TOLERANCE * spec.T:
                logger.warning(
                    "delta_v = %r does not divide T = %r; the last level sits at v = %r", delta_v, spec.T, M * delta_v
                )
        return cls(
            N=N,
            M=M,
            delta_z=(spec.z_r - spec.z_l) / N,
            delta_v=float(delta_v),
            theta=float(theta),
            z_l=spec.z_l,
        )

    @property
    def mesh_ratio(self) -> float:
        return self.delta_v / self.delta_z**2

    def nodes(self) -> np.ndarray:
        """All N+1 nodes, boundaries included."""
        return self.z_l + self.delta_z * np.arange(self.N + 1)

    def time(self, m: int) -> float:
        return m * self.delta_v


@dataclass(frozen=True)
class CoefficientTables:
    """a, b on all nodes; derivative surrogates on the interior nodes 1..N-1."""

    a: np.ndarray
    b: np.ndarray
    dz_a: np.ndarray
    dzz_a: np.ndarray
    dz_b: np.ndarray
    dzz_b: np.ndarray


@dataclass(frozen=True)
class StencilCoefficients:
    """Per-interior-node stencil arrays; index 0 corresponds to node 1."""

    gamma: np.ndarray
    zeta: np.ndarray
    alpha: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    l: np.ndarray  # noqa: E741
    m: np.ndarray
    n: np.ndarray
    delta_z: float = field(default=float("nan"))
    delta_v: float = field(default=float("nan"))

    @property
    def N(self) -> int:
        return len(self.q) + 1

    @classmethod
    def from_rows(cls, p, q, r, l, m, n, **kwargs) -> StencilCoefficients:  # noqa: E741
        """Stencil built directly from X and Y rows (gamma, zeta, alpha unknown)."""
        size = len(q)
        nan = np.full(size, np.nan)
        arrays = [np.asarray(x, dtype=float) for x in (p, q, r, l, m, n)]
        return cls(nan, nan, nan, *arrays, **kwargs)


def _differences(values: np.ndarray, delta_z: float) -> tuple[np.ndarray, np.ndarray]:
    first = (values[2:] - values[:-2]) / (2 * delta_z)
    second = (values[2:] - 2 * values[1:-1] + values[:-2]) / delta_z**2
    return first, second


def sample_coefficients(spec: ProblemSpec, grid: GridSpec) -> CoefficientTables:
    """Sample a and b on the grid and form their derivative tables.

    Without ``spec.derivatives`` the derivatives are central differences
    over neighbouring nodes (boundary nodes feed nodes 1 and N-1).

    Raises:
        CoefficientError: if b does not exceed epsilon at some node, or a
            sampled value is not finite.
        ExpressionDomainError: if a coefficient cannot be evaluated.
    """
    z = grid.nodes()
    a = evaluate_many(spec.a, z)
    b = evaluate_many(spec.b, z)

    low = np.flatnonzero(b <= spec.epsilon)
    if low.size:
        i = int(low[0])
        raise CoefficientError(f"b(z_{i}) = {b[i]!r} does not exceed epsilon = {spec.epsilon!r} at z = {z[i]!r}")

    if spec.derivatives is None:
        dz_a, dzz_a = _differences(a, grid.delta_z)
        dz_b, dzz_b = _differences(b, grid.delta_z)
    else:
        interior = z[1:-1]
        dz_a = evaluate_many(spec.derivatives.da, interior)
        dzz_a = evaluate_many(spec.derivatives.dda, interior)
        dz_b = evaluate_many(spec.derivatives.db, interior)
        dzz_b = evaluate_many(spec.derivatives.ddb, interior)

    tables = CoefficientTables(a=a, b=b, dz_a=dz_a, dzz_a=dzz_a, dz_b=dz_b, dzz_b=dzz_b)
    for name in ("a", "b", "dz_a", "dzz_a", "dz_b", "dzz_b"):
        if not np.all(np.isfinite(getattr(tables, name))):
            raise CoefficientError(f"non-finite entry in {name}")
    return tables


def stencil_from_samples(
    tables: CoefficientTables,
    grid: GridSpec,
    pr_form: PRForm = PRForm.DERIVED,
) -> StencilCoefficients:
    """Compute gamma, zeta, alpha and the X / Y row entries at every interior node."""
    dz, dv = grid.delta_z, grid.delta_v
    a, b = tables.a[1:-1], tables.b[1:-1]
    da, dda, db, ddb = tables.dz_a, tables.dzz_a, tables.dz_b, tables.dzz_b
    h = dz**2 / 12

    gamma = a / b + 2 * db / b
    zeta = a - h * ((a / b) * da + (2 / b) * da * db - dda)
    alpha = b + h * ((a / b) * db - 2 * da + ddb - (2 / b) * db**2 + a**2 / b)

    if pr_form == PRForm.LISTING:
        p = (2 + dz) * gamma / (24 * dv)
        r = (2 - dz) * gamma / (24 * dv)
    else:
        p = (2 + dz * gamma) / (24 * dv)
        r = (2 - dz * gamma) / (24 * dv)
    q = np.full_like(gamma, 5 / (6 * dv))

    l = -zeta / (2 * dz) - alpha / dz**2  # noqa: E741
    m = 2 * alpha / dz**2
    n = zeta / (2 * dz) - alpha / dz**2

    st = StencilCoefficients(gamma, zeta, alpha, p, q, r, l, m, n, delta_z=dz, delta_v=dv)
    _warn_if_not_dominant(st)
    return st


def _warn_if_not_dominant(st: StencilCoefficients) -> None:
    X = TridiagonalMatrix(sub=st.p[1:], diag=st.q, sup=st.r[:-1])
    bad = X.weak_rows()
    if bad.size:
        logger.warning(
            "X is not diagonally dominant at %d rows (first: node %d); delta_z=%.3g may be too large",
            bad.size,
            bad[0] + 1,
            st.delta_z,
        )


def build_stencil(spec: ProblemSpec, grid: GridSpec, pr_form: PRForm = PRForm.DERIVED) -> StencilCoefficients:
    return stencil_from_samples(sample_coefficients(spec, grid), grid, pr_form)
