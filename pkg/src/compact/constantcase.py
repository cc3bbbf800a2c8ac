"""
Constant-coefficient specialization: u_v + c u_z - c u_zz = 0.

The constant equation u_v + a u_z - b u_zz = 0 maps onto this form with
c = a^2/b after rescaling the unknown and the space variable. For it the
eigenvalues of W come in closed-form families indexed by
phi = cos^2(k pi / N), each the root pair of a quadratic whose coefficient
signs certify unconditional stability.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.common.interfaces.report import StabilityReport, Verdict
from src.compact.charpoly import (
    POSITIVITY_TOLERANCE,
    amplification_moduli,
    characteristic_roots,
    eigen_oracle,
    sort_roots,
)
from src.compact.discretization import StencilCoefficients
from src.compact.errors import ProblemSpecError
from src.compact.linalg import ComplexList, TridiagonalMatrix
from src.compact.timestepper import scheme_x, scheme_y

logger = logging.getLogger(__name__)

CHARPOLY_CROSS_CHECK_MAX_N = 20
FAMILY_MATCH_TOLERANCE = 1e-7
CASE_II_INDEX = 0


def transform_to_c(a: float, b: float) -> float:
    """Coefficient c = a^2/b of the transformed equation.

    Raises:
        ProblemSpecError: for a = 0 or b <= 0.
    """
    if a == 0:
        raise ProblemSpecError("transform undefined for a = 0; solve the pure-diffusion equation directly")
    if b <= 0:
        raise ProblemSpecError(f"diffusion coefficient must be positive, got b = {b}")
    return a * a / b


@dataclass(frozen=True)
class ConstantProblem:
    c: float
    delta_z: float
    delta_v: float
    N: int
    d: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ProblemSpecError(f"c must be positive, got {self.c}")
        if not (self.delta_z > 0 and self.delta_v > 0):
            raise ProblemSpecError("grid spacings must be positive")
        if self.N < 2:
            raise ProblemSpecError(f"N must be at least 2, got {self.N}")
        ratio = self.delta_v / self.delta_z**2
        if math.isnan(self.d):
            object.__setattr__(self, "d", ratio)
        elif abs(self.d - ratio) > 1e-15 * ratio:
            raise ProblemSpecError(f"d = {self.d} does not match delta_v / delta_z^2 = {ratio}")


def constant_problem_from_ratio(c: float, N: int, d: float, delta_z: float | None = None) -> ConstantProblem:
    """Problem on a unit-length domain (delta_z = 1/N unless given) with delta_v = d delta_z^2."""
    if delta_z is None:
        delta_z = 1.0 / N
    return ConstantProblem(c=c, delta_z=delta_z, delta_v=d * delta_z**2, N=N)


@dataclass(frozen=True)
class ConstantStencil:
    """Entries of X1 (c1, c2, c3) and Y1 (y1, y2, y3), as (sub, diag, sup)."""

    c1: float
    c2: float
    c3: float
    y1: float
    y2: float
    y3: float

    def to_stencil(self, N: int, cp: ConstantProblem) -> StencilCoefficients:
        def full(value: float) -> np.ndarray:
            return np.full(N - 1, value, dtype=float)

        return StencilCoefficients(
            gamma=full(1.0),
            zeta=full(cp.c),
            alpha=full(cp.c * (1 + cp.delta_z**2 / 12)),
            p=full(self.c1),
            q=full(self.c2),
            r=full(self.c3),
            l=full(self.y1),
            m=full(self.y2),
            n=full(self.y3),
            delta_z=cp.delta_z,
            delta_v=cp.delta_v,
        )


def constant_stencil(cp: ConstantProblem) -> ConstantStencil:
    c, dz, dv, d = cp.c, cp.delta_z, cp.delta_v, cp.d
    diffusion = c * (1 + dz**2 / 12) / dz**2
    stencil = ConstantStencil(
        c1=(2 + dz) / (24 * dv),
        c2=5 / (6 * dv),
        c3=(2 - dz) / (24 * dv),
        y1=-c / (2 * dz) - diffusion,
        y2=2 * diffusion,
        y3=c / (2 * dz) - diffusion,
    )

    ratio_form = (
        (-c / (2 * dv)) * ((2 + dz) * d + dv / 6),
        (c / dv) * (2 * d + dv / 6),
        (-c / (2 * dv)) * ((2 - dz) * d + dv / 6),
    )
    for name, direct, other in zip(("y1", "y2", "y3"), (stencil.y1, stencil.y2, stencil.y3), ratio_form):
        if abs(direct - other) > 1e-13 * abs(direct):
            logger.warning("%s disagrees between forms: %r vs %r", name, direct, other)
    return stencil


def constant_matrices(cs: ConstantStencil, N: int) -> tuple[TridiagonalMatrix, TridiagonalMatrix]:
    """(X1, Y1) of order N - 1."""
    size = N - 1
    X1 = TridiagonalMatrix.from_bands([cs.c1] * (size - 1), [cs.c2] * size, [cs.c3] * (size - 1))
    Y1 = TridiagonalMatrix.from_bands([cs.y1] * (size - 1), [cs.y2] * size, [cs.y3] * (size - 1))
    return X1, Y1


def phi_zero_eigenvalue(cp: ConstantProblem) -> float:
    """Eigenvalue (6c/5)(2d + delta_v/6), equal to y2/c2."""
    return (6 * cp.c / 5) * (2 * cp.d + cp.delta_v / 6)


@dataclass(frozen=True)
class FamilyQuadratic:
    """lead lambda^2 - middle lambda + constant = 0 for one value of phi."""

    phi: float
    lead: float
    middle: float
    constant: float

    @property
    def signs_positive(self) -> bool:
        return self.lead > 0 and self.middle > 0 and self.constant > 0


def family_quadratic(cs: ConstantStencil, phi: float) -> FamilyQuadratic:
    return FamilyQuadratic(
        phi=phi,
        lead=cs.c2**2 - 4 * cs.c1 * cs.c3 * phi,
        middle=2 * cs.c2 * cs.y2 - 4 * cs.c1 * cs.y3 * phi - 4 * cs.c3 * cs.y1 * phi,
        constant=cs.y2**2 - 4 * cs.y1 * cs.y3 * phi,
    )


def quadratic_roots(a: float, b: float, c: float) -> ComplexList:
    """Roots of a x^2 + b x + c; the larger one first, the other from the product."""
    disc = b * b - 4 * a * c
    if disc >= 0:
        s = -(b + math.copysign(math.sqrt(disc), b)) / 2
        if s == 0:
            return np.zeros(2, dtype=complex)
        return np.array([s / a, c / s], dtype=complex)
    root = cmath.sqrt(disc)
    return np.array([(-b + root) / (2 * a), (-b - root) / (2 * a)], dtype=complex)


def family_phi(N: int, k: int) -> float:
    if 2 * k == N:
        return 0.0
    return math.cos(k * math.pi / N) ** 2


def eigen_family(cp: ConstantProblem, k: int) -> ComplexList:
    """Both roots of the family quadratic for phi = cos^2(k pi / N)."""
    if not 1 <= k <= cp.N - 1:
        raise ValueError(f"k must be in 1..{cp.N - 1}, got {k}")
    phi = family_phi(cp.N, k)
    if phi == 0.0:
        value = phi_zero_eigenvalue(cp)
        return np.array([value, value], dtype=complex)
    quad = family_quadratic(constant_stencil(cp), phi)
    return quadratic_roots(quad.lead, -quad.middle, quad.constant)


def excluded_values(cs: ConstantStencil) -> list[float]:
    """Lambda solving A = 0 (y3 / c3) or C = 0 (y1 / c1); never eigenvalues."""
    values = [cs.y1 / cs.c1]
    if cs.c3 != 0:
        values.append(cs.y3 / cs.c3)
    return values


def family_roots(cp: ConstantProblem) -> ComplexList:
    return np.concatenate([eigen_family(cp, k) for k in range(1, cp.N)])


def stability_certificate(cp: ConstantProblem, theta: float = 1.0) -> StabilityReport:
    """Sign checks on every family quadratic and the Case II (phi = 1) quadratic.

    The family roots are cross-checked against D1_N roots of the constant
    stencil (dense eigenvalues of W above N = 20).

    Raises:
        ProblemSpecError: if delta_z >= 2.
    """
    if cp.delta_z >= 2:
        raise ProblemSpecError(f"certificate requires delta_z < 2, got {cp.delta_z}")
    cs = constant_stencil(cp)
    failed: list[int] = []
    notes: list[str] = []

    for k in range(1, cp.N):
        if not family_quadratic(cs, family_phi(cp.N, k)).signs_positive:
            failed.append(k)
    if not family_quadratic(cs, 1.0).signs_positive:
        failed.append(CASE_II_INDEX)
        notes.append("Case II quadratic failed the sign check")

    roots = sort_roots(family_roots(cp))
    moduli = amplification_moduli(roots, theta)
    min_real = float(np.min(roots.real))
    radius = float(np.max(moduli))
    threshold = POSITIVITY_TOLERANCE * (1 + float(np.max(np.abs(roots))))

    stencil = cs.to_stencil(cp.N, cp)
    if cp.N <= CHARPOLY_CROSS_CHECK_MAX_N:
        reference = characteristic_roots(stencil)
    else:
        reference = eigen_oracle(scheme_x(stencil), scheme_y(stencil))
    missing = np.array(
        [lam for lam in reference if np.min(np.abs(roots - lam)) > FAMILY_MATCH_TOLERANCE * max(abs(lam), 1.0)],
        dtype=complex,
    )
    if missing.size:
        logger.warning("%d eigenvalues of the constant stencil are outside the families", missing.size)
        notes.append("eigenvalues outside the phi families")

    certified = not failed and not missing.size and min_real > threshold and radius < 1
    return StabilityReport(
        N=cp.N,
        theta=theta,
        roots=roots,
        min_real_part=min_real,
        amplification_moduli=moduli,
        spectral_radius=radius,
        verdict=Verdict.STABLE if certified else Verdict.NOT_CERTIFIED,
        excluded_values=excluded_values(cs),
        unmatched_roots=missing,
        failed_k=failed,
        notes=notes,
    )
