"""
Characteristic polynomial D1_N of the pencil (Y - lambda X) and stability verdicts.

The pencil rows read C_j x_{j-1} + B_j x_j + A_j x_{j+1} = 0 with

    A_j = n_j - lambda r_j,  B_j = m_j - lambda q_j,  C_j = l_j - lambda p_j.

Writing R_j = (A_0 ... A_{j-1}) x_j = u_j(lambda) x_1 + w_j(lambda) gives the
three-term recurrence

    R_{j+1} = -B_j R_j - C_j A_{j-1} R_{j-1},  R_0 = 1, R_1 = x_1, A_0 = 1,

and D1_N = u_N, D2_N = w_N. Every eigenvalue of W = X^-1 Y is a root of D1_N.

Usage:
    st = build_stencil(spec, grid)
    roots = characteristic_roots(st)
    report = stability_verdict(roots, theta=1.0)
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from src.common.interfaces.report import StabilityReport, Verdict
from src.compact.discretization import StencilCoefficients
from src.compact.errors import EnumerationLimitError
from src.compact.linalg import ComplexList, TridiagonalMatrix, eigenvalues_dense, pencil_operator
from src.compact.timestepper import scheme_x, scheme_y

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 14
SYMBOLIC_LIMIT = 8
CANCELLATION_TOLERANCE = 1e-12
ROOT_RESIDUAL_TOLERANCE = 1e-8
POSITIVITY_TOLERANCE = 1e-9
ORACLE_TOLERANCE = 1e-6
ABERTH_SWEEPS = 100
ROOT_STEP_TOLERANCE = 1e-12
REAL_SNAP = 1e-9
SEED_ROTATION = 1e-6


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial exp(log_scale) * sum(coeffs[k] * lambda**k).

    Trailing zero coefficients are trimmed so the leading one is non-zero.
    """

    coeffs: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self) -> None:
        coeffs = np.trim_zeros(np.asarray(self.coeffs, dtype=float), "b")
        if coeffs.size == 0:
            coeffs = np.zeros(1)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def scale(self) -> float:
        return float(np.exp(self.log_scale))

    def normalized(self) -> np.ndarray:
        """Coefficients divided by the largest magnitude, for scale-free comparison."""
        peak = np.max(np.abs(self.coeffs))
        return self.coeffs / peak if peak > 0 else self.coeffs.copy()

    def __call__(self, lam: complex) -> complex:
        return self.scale * P.polyval(lam, self.coeffs)


@dataclass(frozen=True)
class LambdaAffineTriple:
    """(constant, slope) pairs of A_j, B_j, C_j for j = 1..N-1; row j-1 holds index j."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def N(self) -> int:
        return len(self.B) + 1


def lambda_affine_coeffs(st: StencilCoefficients) -> LambdaAffineTriple:
    return LambdaAffineTriple(
        A=np.column_stack((st.n, -st.r)),
        B=np.column_stack((st.m, -st.q)),
        C=np.column_stack((st.l, -st.p)),
    )


def _times_affine(poly: np.ndarray, affine: np.ndarray) -> np.ndarray:
    """poly * (c0 + c1 lambda), same length (the top coefficient must be free)."""
    out = affine[0] * poly
    out[1:] += affine[1] * poly[:-1]
    return out


def _step(cur: np.ndarray, prev: np.ndarray, b_j: np.ndarray, ca: np.ndarray) -> np.ndarray:
    """-B_j cur - (C_j A_{j-1}) prev, flushing coefficients that cancel to rounding level."""
    first = -_times_affine(cur, b_j)
    second = -np.convolve(prev, ca)[: len(cur)]
    out = first + second
    out[np.abs(out) <= CANCELLATION_TOLERANCE * (np.abs(first) + np.abs(second))] = 0.0
    return out


def charpoly_D1(N: int, abc: LambdaAffineTriple) -> tuple[Polynomial, Polynomial]:
    """D1_N and D2_N by the O(N) three-term recurrence.

    Each step divides both polynomial pairs by their largest coefficient and
    accumulates the factor in ``log_scale``. A coefficient whose two
    contributions cancel to rounding level is set to zero, so a collapsed
    leading term lowers the degree.
    """
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    if abc.N != N:
        raise ValueError(f"triple has N={abc.N}, expected {N}")

    size = N + 1
    u_prev, w_prev = np.zeros(size), np.zeros(size)
    w_prev[0] = 1.0
    u_cur, w_cur = np.zeros(size), np.zeros(size)
    u_cur[0] = 1.0
    log_scale = 0.0

    for j in range(1, N):
        c_j = abc.C[j - 1]
        ca = c_j if j == 1 else _times_affine(np.array([c_j[0], c_j[1], 0.0]), abc.A[j - 2])
        u_next = _step(u_cur, u_prev, abc.B[j - 1], ca)
        w_next = _step(w_cur, w_prev, abc.B[j - 1], ca)

        peak = max(np.max(np.abs(u_next)), np.max(np.abs(w_next)))
        if peak > 0:
            u_next, w_next = u_next / peak, w_next / peak
            u_cur, w_cur = u_cur / peak, w_cur / peak
            log_scale += np.log(peak)
        u_prev, w_prev, u_cur, w_cur = u_cur, w_cur, u_next, w_next

    d1 = Polynomial(u_cur[:N], log_scale)
    d2 = Polynomial(w_cur[:N], log_scale)
    if d1.degree < N - 1:
        logger.warning("D1_%d degree collapsed to %d", N, d1.degree)
    logger.debug("D1_%d log scale %.3f", N, log_scale)
    return d1, d2


def evaluate_D1_many(lams: np.ndarray, abc: LambdaAffineTriple) -> tuple[np.ndarray, np.ndarray]:
    """D1_N and its lambda-derivative at every point of ``lams``.

    Each point carries its own positive scale factor, shared by the value and
    the derivative, so only their ratio and the sign structure are meaningful.
    """
    lams = np.asarray(lams, dtype=complex)
    r_prev, r_cur = np.zeros_like(lams), np.ones_like(lams)
    d_prev, d_cur = np.zeros_like(lams), np.zeros_like(lams)
    a_prev, da_prev = np.ones_like(lams), np.zeros_like(lams)

    for j in range(1, abc.N):
        b0, b1 = abc.B[j - 1]
        c0, c1 = abc.C[j - 1]
        b = b0 + b1 * lams
        c = c0 + c1 * lams
        ca = c * a_prev
        dca = c1 * a_prev + c * da_prev
        r_next = -b * r_cur - ca * r_prev
        d_next = -b1 * r_cur - b * d_cur - dca * r_prev - ca * d_prev

        peak = np.maximum(np.maximum(np.abs(r_next), np.abs(r_cur)), 1e-300)
        r_prev, r_cur = r_cur / peak, r_next / peak
        d_prev, d_cur = d_cur / peak, d_next / peak

        a0, a1 = abc.A[j - 1]
        a_prev, da_prev = a0 + a1 * lams, np.full_like(lams, a1)

    return r_cur, d_cur


def evaluate_D1(lam: complex, abc: LambdaAffineTriple) -> tuple[complex, complex]:
    """D1_N(lam) and its lambda-derivative, up to a common positive factor."""
    value, derivative = evaluate_D1_many(np.array([lam]), abc)
    return complex(value[0]), complex(derivative[0])


def polynomial_roots(p: Polynomial) -> ComplexList:
    """Roots from the eigenvalues of the (LAPACK-balanced) companion matrix."""
    if p.degree < 1:
        raise ValueError("polynomial has no roots (degree < 1)")
    monic = p.coeffs / p.coeffs[-1]
    if p.degree == 1:
        roots = np.array([-monic[0]], dtype=complex)
    else:
        roots = eigenvalues_dense(scipy.linalg.companion(monic[::-1]))

    norm = np.linalg.norm(monic)
    for lam in roots:
        residual = abs(P.polyval(lam, monic)) / (norm * (1 + abs(lam)) ** p.degree)
        if residual > ROOT_RESIDUAL_TOLERANCE:
            logger.warning("root %s has residual %.3e", lam, residual)
    return roots


def refine_roots(roots: ComplexList, abc: LambdaAffineTriple, max_sweeps: int = ABERTH_SWEEPS) -> ComplexList:
    """Polish all roots together by Aberth-Ehrlich iteration on the recurrence.

    Each correction is the Newton step D1/D1' deflated by the other current
    roots, so two seeds cannot settle on the same root. Seeds are rotated by
    a tiny angle first so that a conjugate pair can separate onto the real
    axis; results within ``REAL_SNAP`` of the axis are returned as real.
    """
    z = np.array(roots, dtype=complex) * np.exp(1j * SEED_ROTATION)
    if z.size == 0:
        return z
    active = np.ones(z.size, dtype=bool)

    for sweep in range(1, max_sweeps + 1):
        value, derivative = evaluate_D1_many(z[active], abc)
        with np.errstate(all="ignore"):
            newton = value / derivative
            gaps = z[active, None] - z[None, :]
            gaps[np.arange(gaps.shape[0]), np.flatnonzero(active)] = np.inf
            repulsion = np.sum(1.0 / gaps, axis=1)
            correction = newton / (1.0 - newton * repulsion)
        correction[~np.isfinite(correction)] = 0.0

        idx = np.flatnonzero(active)
        z[idx] -= correction
        done = np.abs(correction) <= ROOT_STEP_TOLERANCE * np.maximum(np.abs(z[idx]), 1.0)
        active[idx[done]] = False
        if not active.any():
            logger.debug("Aberth iteration converged in %d sweeps", sweep)
            break
    else:
        logger.warning("%d of %d roots still moving after %d sweeps", int(active.sum()), z.size, max_sweeps)

    real = np.abs(z.imag) <= REAL_SNAP * np.maximum(np.abs(z), 1.0)
    z[real] = z[real].real
    return z


def sort_roots(roots: ComplexList) -> ComplexList:
    """Descending by real part, then by imaginary part."""
    roots = np.asarray(roots, dtype=complex)
    order = np.lexsort((-roots.imag, -roots.real))
    return roots[order]


def characteristic_roots(st: StencilCoefficients) -> ComplexList:
    abc = lambda_affine_coeffs(st)
    d1, _ = charpoly_D1(st.N, abc)
    return sort_roots(refine_roots(polynomial_roots(d1), abc))


def _sequences(N: int) -> Iterator[tuple[tuple[str, int], ...]]:
    """Members of the sequence family, written from s_{N-1} down to s_1.

    s_{N-1} is -B or -C; after -C_j comes A_{j-1}; otherwise -B or -C.
    """

    def extend(j: int, forced_a: bool) -> Iterator[tuple[tuple[str, int], ...]]:
        if j == 0:
            yield ()
            return
        choices = ("A",) if forced_a else ("B", "C")
        for letter in choices:
            for rest in extend(j - 1, letter == "C"):
                yield ((letter, j),) + rest

    yield from extend(N - 1, False)


def enumerate_charpoly(N: int, abc: LambdaAffineTriple, limit: int = ENUMERATION_LIMIT) -> tuple[Polynomial, int]:
    """D1_N as the sum of products over the sequence family, and the family size.

    Exponential in N; kept as an oracle for the recurrence.
    """
    if N > limit:
        raise EnumerationLimitError(f"enumeration is capped at N={limit}, got N={N}")
    affine = {"A": abc.A, "B": -abc.B, "C": -abc.C}
    total = np.zeros(N)
    count = 0
    for seq in _sequences(N):
        count += 1
        if seq[-1] == ("C", 1):
            continue
        term = np.ones(1)
        for letter, j in seq:
            term = P.polymul(term, affine[letter][j - 1])
        total[: len(term)] += term
    return Polynomial(total), count


def symbolic_D1(N: int, limit: int = SYMBOLIC_LIMIT) -> list[str]:
    """Signed A/B/C product terms of D1_N, e.g. ``["+A2B1C3", "+A1B3C2", "-B1B2B3"]``."""
    if N > limit:
        raise EnumerationLimitError(f"symbolic expansion is capped at N={limit}, got N={N}")
    terms = []
    for seq in _sequences(N):
        if seq[-1] == ("C", 1):
            continue
        negatives = sum(1 for letter, _ in seq if letter != "A")
        body = "".join(f"{letter}{j}" for letter, j in sorted(seq))
        terms.append(("-" if negatives % 2 else "+") + body)
    return terms


def format_symbolic(terms: list[str]) -> str:
    text = " ".join(f"{t[0]} {t[1:]}" for t in terms)
    if text.startswith("+ "):
        return text[2:]
    return "-" + text[2:]


def amplification_moduli(roots: ComplexList, theta: float) -> np.ndarray:
    """|1/(1+lambda)| for theta = 1, |(1-lambda/2)/(1+lambda/2)| for theta = 1/2."""
    roots = np.asarray(roots, dtype=complex)
    if theta == 1.0:
        return np.abs(1.0 / (1.0 + roots))
    half = roots / 2
    return np.abs((1.0 - half) / (1.0 + half))


def stability_verdict(roots: ComplexList, theta: float) -> StabilityReport:
    """Stable iff every root has real part above 1e-9 (1 + max|lambda|) and every modulus is below 1."""
    roots = sort_roots(roots)
    notes: list[str] = []
    if roots.size == 0:
        return StabilityReport(
            N=1,
            theta=theta,
            roots=roots,
            min_real_part=float("nan"),
            amplification_moduli=np.array([]),
            spectral_radius=float("nan"),
            verdict=Verdict.NOT_CERTIFIED,
            notes=["no roots"],
        )

    moduli = amplification_moduli(roots, theta)
    min_real = float(np.min(roots.real))
    radius = float(np.max(moduli))
    threshold = POSITIVITY_TOLERANCE * (1 + float(np.max(np.abs(roots))))
    positive = min_real > threshold
    if positive and radius >= 1:
        notes.append("positive real parts but amplification modulus >= 1")
    verdict = Verdict.STABLE if positive and radius < 1 else Verdict.NOT_CERTIFIED
    return StabilityReport(
        N=len(roots) + 1,
        theta=theta,
        roots=roots,
        min_real_part=min_real,
        amplification_moduli=moduli,
        spectral_radius=radius,
        verdict=verdict,
        notes=notes,
    )


def eigen_oracle(X: TridiagonalMatrix, Y: TridiagonalMatrix) -> ComplexList:
    """Eigenvalues of the dense W = X^-1 Y."""
    return sort_roots(eigenvalues_dense(pencil_operator(X, Y)))


def unmatched(roots: ComplexList, reference: ComplexList, rtol: float = ORACLE_TOLERANCE) -> ComplexList:
    """Roots with no reference value within ``rtol`` relative distance."""
    reference = np.asarray(reference, dtype=complex)
    missing = [
        lam
        for lam in roots
        if reference.size == 0 or np.min(np.abs(reference - lam)) > rtol * max(abs(lam), 1.0)
    ]
    return np.array(missing, dtype=complex)


def analyze_stability(st: StencilCoefficients, theta: float, with_oracle: bool = False) -> StabilityReport:
    """Full verdict pipeline for one stencil; optionally cross-checks roots against the dense oracle."""
    abc = lambda_affine_coeffs(st)
    d1, _ = charpoly_D1(st.N, abc)
    deficit = (st.N - 1) - d1.degree
    roots = sort_roots(refine_roots(polynomial_roots(d1), abc)) if d1.degree >= 1 else np.array([], dtype=complex)

    report = stability_verdict(roots, theta)
    report.N = st.N
    report.degree_deficit = deficit
    if deficit:
        report.notes.append(f"degree of D1_{st.N} collapsed by {deficit}")

    if with_oracle:
        oracle = eigen_oracle(scheme_x(st), scheme_y(st))
        report.unmatched_roots = unmatched(roots, oracle)
        if report.unmatched_roots.size:
            logger.warning("%d roots of D1_%d are not eigenvalues of W", report.unmatched_roots.size, st.N)
            report.notes.append("some roots have no matching eigenvalue of W")
    return report
