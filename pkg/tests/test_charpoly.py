"""Characteristic polynomial recurrence, root finding and stability verdicts."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from src.common.interfaces.report import Verdict
from src.compact.charpoly import (
    ENUMERATION_LIMIT,
    Polynomial,
    amplification_moduli,
    analyze_stability,
    characteristic_roots,
    charpoly_D1,
    eigen_oracle,
    enumerate_charpoly,
    evaluate_D1,
    format_symbolic,
    lambda_affine_coeffs,
    polynomial_roots,
    sort_roots,
    stability_verdict,
    symbolic_D1,
    unmatched,
)
from src.compact.discretization import GridSpec, PRForm, ProblemSpec, StencilCoefficients, build_stencil
from src.compact.errors import EnumerationLimitError
from src.compact.timestepper import scheme_x, scheme_y


def _fibonacci(n: int) -> int:
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def _smooth_problem(seed: int) -> ProblemSpec:
    """Random a(z) = a0 + a1 sin(w z + phi) and b(z) = b0 + b1 cos(w z) with b bounded away from zero."""
    rng = np.random.default_rng(seed)
    a0, a1 = rng.uniform(-1.5, 1.5), rng.uniform(0.0, 0.5)
    b0 = rng.uniform(0.5, 2.0)
    b1 = rng.uniform(0.0, 0.4) * b0
    w1, w2, phi = rng.uniform(0.5, 4.0), rng.uniform(0.5, 4.0), rng.uniform(0.0, np.pi)
    return ProblemSpec.from_text(
        a=f"{a0:.6f}+{a1:.6f}*sin({w1:.6f}*z+{phi:.6f})",
        b=f"{b0:.6f}+{b1:.6f}*cos({w2:.6f}*z)",
    )


def _smooth_stencil(seed: int, N: int) -> StencilCoefficients:
    spec = _smooth_problem(seed)
    return build_stencil(spec, GridSpec.build(spec, N=N, delta_v=0.1))


class TestPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = Polynomial(np.array([1.0, 2.0, 0.0, 0.0]))
        assert p.degree == 1
        assert p(1.0) == 3.0

    def test_scale_applied(self):
        p = Polynomial(np.array([2.0, 1.0]), log_scale=np.log(10.0))
        assert p(0.0) == pytest.approx(20.0)
        np.testing.assert_allclose(p.normalized(), [1.0, 0.5])

    def test_roots_of_known_polynomial(self):
        roots = polynomial_roots(Polynomial(np.array([6.0, -5.0, 1.0])))
        np.testing.assert_allclose(sorted(roots.real), [2.0, 3.0], rtol=1e-12)

    def test_constant_has_no_roots(self):
        with pytest.raises(ValueError):
            polynomial_roots(Polynomial(np.array([3.0])))


class TestRecurrence:
    def test_affine_triple_for_three_intervals(self, reference_stencil):
        abc = lambda_affine_coeffs(reference_stencil(3))
        assert abc.N == 3
        np.testing.assert_allclose(abc.A[0], [-13.6354, -0.3125], atol=1e-4)

    def test_two_intervals_is_minus_b(self, reference_stencil):
        st = reference_stencil(2)
        d1, _ = charpoly_D1(2, lambda_affine_coeffs(st))
        assert d1.degree == 1
        assert -d1.coeffs[0] / d1.coeffs[1] == pytest.approx(st.m[0] / st.q[0], rel=1e-14)

    def test_rejects_mismatched_triple(self, reference_stencil):
        with pytest.raises(ValueError):
            charpoly_D1(5, lambda_affine_coeffs(reference_stencil(4)))

    @pytest.mark.parametrize("N", [2, 3, 4, 7, 12])
    def test_matches_enumeration(self, reference_stencil, N: int):
        abc = lambda_affine_coeffs(reference_stencil(N))
        d1, _ = charpoly_D1(N, abc)
        enumerated, _ = enumerate_charpoly(N, abc)
        np.testing.assert_allclose(d1.normalized(), enumerated.normalized(), atol=1e-10)

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_enumeration_for_smooth_coefficients(self, seed: int):
        N = 2 + seed % 11
        abc = lambda_affine_coeffs(_smooth_stencil(seed, N))
        d1, _ = charpoly_D1(N, abc)
        enumerated, _ = enumerate_charpoly(N, abc)
        assert d1.degree == enumerated.degree
        np.testing.assert_allclose(d1.normalized(), enumerated.normalized(), atol=1e-10)

    @pytest.mark.parametrize("N", [4, 9])
    def test_evaluation_vanishes_at_roots(self, reference_stencil, N: int):
        st = reference_stencil(N)
        abc = lambda_affine_coeffs(st)
        for lam in characteristic_roots(st):
            value, derivative = evaluate_D1(lam, abc)
            assert abs(value) <= 1e-8 * abs(derivative) * max(abs(lam), 1.0)


class TestEnumeration:
    @pytest.mark.parametrize("N", range(2, ENUMERATION_LIMIT + 1))
    def test_family_size_is_fibonacci(self, reference_stencil, N: int):
        _, size = enumerate_charpoly(N, lambda_affine_coeffs(reference_stencil(N)))
        assert size == _fibonacci(N + 1)

    def test_limit(self, reference_stencil):
        abc = lambda_affine_coeffs(reference_stencil(4))
        with pytest.raises(EnumerationLimitError):
            enumerate_charpoly(ENUMERATION_LIMIT + 1, abc)

    @pytest.mark.parametrize(
        "N, terms",
        [
            (2, {"-B1"}),
            (3, {"+B1B2", "-A1C2"}),
            (4, {"-B1B2B3", "+A1B3C2", "+A2B1C3"}),
        ],
    )
    def test_symbolic_terms(self, N: int, terms: set[str]):
        assert set(symbolic_D1(N)) == terms

    def test_symbolic_term_count(self):
        assert len(symbolic_D1(8)) == 21

    def test_symbolic_limit(self):
        with pytest.raises(EnumerationLimitError):
            symbolic_D1(9)

    def test_format(self):
        assert format_symbolic(["+B1B2", "-A1C2"]) == "B1B2 - A1C2"
        assert format_symbolic(["-B1"]) == "-B1"


class TestReferenceRoots:
    @pytest.mark.parametrize("N", range(2, 9))
    def test_roots_match_reference(self, reference_stencil, reference_roots, N: int):
        roots = characteristic_roots(reference_stencil(N))
        assert np.all(np.abs(roots.imag) < 1e-10)
        np.testing.assert_allclose(roots.real, reference_roots[N], atol=5e-4)

    def test_listing_form_moves_roots(self, reference_problem: ProblemSpec, reference_grid, reference_roots):
        st = build_stencil(reference_problem, reference_grid(3), PRForm.LISTING)
        roots = characteristic_roots(st)
        assert np.max(np.abs(roots.real - np.array(reference_roots[3]))) > 0.5

    @pytest.mark.parametrize("N", range(2, 31))
    def test_roots_are_eigenvalues(self, reference_stencil, N: int):
        st = reference_stencil(N)
        roots = characteristic_roots(st)
        oracle = eigen_oracle(scheme_x(st), scheme_y(st))
        assert len(roots) == len(oracle) == N - 1
        assert unmatched(roots, oracle).size == 0
        assert unmatched(oracle, roots).size == 0

    def test_thirty_intervals_report_has_no_unmatched_roots(self, reference_stencil):
        report = analyze_stability(reference_stencil(30), 0.5, with_oracle=True)
        assert report.degree_deficit == 0
        assert report.unmatched_roots.size == 0
        assert report.stable

    @pytest.mark.parametrize("seed", range(20))
    def test_random_smooth_coefficients_match_eigenvalues(self, seed: int):
        for N in range(2, 31):
            st = _smooth_stencil(seed, N)
            roots = characteristic_roots(st)
            oracle = eigen_oracle(scheme_x(st), scheme_y(st))
            assert len(roots) == len(oracle), f"N={N}"
            assert unmatched(roots, oracle).size == 0, f"N={N}"
            assert unmatched(oracle, roots).size == 0, f"N={N}"

    @pytest.mark.parametrize("N", [6, 17])
    def test_row_scaling_leaves_roots_unchanged(self, reference_stencil, rng, N: int):
        st = reference_stencil(N)
        s = rng.uniform(0.1, 10.0, size=N - 1)
        scaled = dataclasses.replace(st, p=st.p * s, q=st.q * s, r=st.r * s, l=st.l * s, m=st.m * s, n=st.n * s)
        np.testing.assert_allclose(characteristic_roots(scaled), characteristic_roots(st), rtol=1e-9)

    @pytest.mark.parametrize("N", [5, 12])
    def test_halved_operator_gives_crank_nicolson_moduli(self, reference_stencil, N: int):
        st = reference_stencil(N)
        doubled_x = dataclasses.replace(st, p=2 * st.p, q=2 * st.q, r=2 * st.r)
        half = characteristic_roots(doubled_x)
        expected = amplification_moduli(characteristic_roots(st), 0.5)
        np.testing.assert_allclose(np.abs((1 - half) / (1 + half)), expected, rtol=0, atol=1e-12)

    @pytest.mark.parametrize(
        "a, b",
        [
            ("1+0.5*sin(3*z)", "1+z^2"),
            ("exp(-z)", "0.5+0.25*cos(2*z)"),
            ("-2+z", "2-z"),
        ],
    )
    def test_roots_are_eigenvalues_for_smooth_coefficients(self, a: str, b: str):
        spec = ProblemSpec.from_text(a=a, b=b)
        st = build_stencil(spec, GridSpec.build(spec, N=10, delta_v=0.05))
        roots = characteristic_roots(st)
        assert unmatched(roots, eigen_oracle(scheme_x(st), scheme_y(st))).size == 0


class TestVerdict:
    def test_sorting(self):
        roots = sort_roots(np.array([1.0, 3.0 - 1j, 3.0 + 1j, 2.0]))
        np.testing.assert_array_equal(roots, [3.0 + 1j, 3.0 - 1j, 2.0, 1.0])

    def test_single_root_modulus(self):
        report = stability_verdict(np.array([2.06]), theta=1.0)
        assert report.stable
        assert report.spectral_radius == pytest.approx(1 / 3.06, rel=1e-12)
        assert report.spectral_radius == pytest.approx(0.3268, abs=1e-4)

    def test_crank_nicolson_modulus(self):
        np.testing.assert_allclose(amplification_moduli(np.array([2.0, 2j]), 0.5), [0.0, 1.0], atol=1e-15)

    def test_negative_root_not_certified(self):
        with np.errstate(all="ignore"):
            report = stability_verdict(np.array([-1.0]), theta=1.0)
        assert report.verdict is Verdict.NOT_CERTIFIED

    def test_tiny_positive_root_not_certified(self):
        report = stability_verdict(np.array([1e-12, 5.0]), theta=1.0)
        assert report.verdict is Verdict.NOT_CERTIFIED

    def test_empty_roots(self):
        report = stability_verdict(np.array([], dtype=complex), theta=1.0)
        assert report.verdict is Verdict.NOT_CERTIFIED
        assert report.notes == ["no roots"]

    @pytest.mark.parametrize("theta", [1.0, 0.5])
    def test_reference_problem_is_stable(self, reference_stencil, theta: float):
        report = analyze_stability(reference_stencil(8), theta, with_oracle=True)
        assert report.stable
        assert report.N == 8
        assert report.degree_deficit == 0
        assert report.unmatched_roots.size == 0
        assert report.min_real_part == pytest.approx(2.1534, abs=5e-4)
        assert np.all(report.amplification_moduli < 1)
