"""Assembly of the theta-scheme and time marching."""

from __future__ import annotations

import numpy as np
import pytest

from src.compact.convergence import (
    bounded_growth_run,
    decaying_linear_problem,
    forced_oscillation_problem,
    growth_excess,
    max_error,
)
from src.compact.discretization import GridSpec, ProblemSpec, build_stencil
from src.compact.errors import ProblemSpecError
from src.compact.linalg import dense_from_tridiagonal
from src.compact.timestepper import (
    advance_step,
    assemble_matrices,
    boundary_vector,
    initial_level,
    scheme_x,
    scheme_y,
    solve_ibvp,
)


class TestAssembly:
    def test_x_for_three_intervals(self, reference_stencil):
        X = dense_from_tridiagonal(scheme_x(reference_stencil(3)))
        np.testing.assert_allclose(X, [[25 / 3, 0.3125], [1.25, 25 / 3]], rtol=1e-12)

    def test_y_layout(self, reference_stencil):
        st = reference_stencil(4)
        Y = dense_from_tridiagonal(scheme_y(st))
        np.testing.assert_array_equal(np.diag(Y), st.m)
        np.testing.assert_array_equal(np.diag(Y, -1), st.l[1:])
        np.testing.assert_array_equal(np.diag(Y, 1), st.n[:-1])

    @pytest.mark.parametrize("theta", [1.0, 0.5])
    def test_theta_combinations(self, reference_stencil, theta: float):
        sm = assemble_matrices(reference_stencil(5), theta)
        X, Y = dense_from_tridiagonal(sm.X), dense_from_tridiagonal(sm.Y)
        np.testing.assert_allclose(dense_from_tridiagonal(sm.lhs), X + theta * Y, rtol=1e-14)
        np.testing.assert_allclose(dense_from_tridiagonal(sm.rhs_mat), X - (1 - theta) * Y, rtol=1e-14, atol=1e-13)

    def test_bad_theta(self, reference_stencil):
        with pytest.raises(ProblemSpecError):
            assemble_matrices(reference_stencil(4), 0.25)


class TestBoundaryVector:
    def test_zero_boundary_data(self, reference_problem: ProblemSpec, reference_grid):
        grid = reference_grid(6)
        st = build_stencil(reference_problem, grid)
        np.testing.assert_array_equal(boundary_vector(reference_problem, st, grid, 0, 1.0), np.zeros(5))

    @pytest.mark.parametrize("theta", [1.0, 0.5])
    def test_constant_data_touches_end_entries_only(self, theta: float):
        spec = ProblemSpec.from_text(a="z+1", b="(z+1)^2", k="1", h1="1", h2="1")
        grid = GridSpec.build(spec, N=6, delta_v=0.1, theta=theta)
        st = build_stencil(spec, grid)
        F = boundary_vector(spec, st, grid, 0, theta)
        assert np.all(F[1:-1] == 0.0)
        assert F[0] == pytest.approx(-st.l[0], rel=1e-12)
        assert F[-1] == pytest.approx(-st.n[-1], rel=1e-12)

    def test_single_interior_node_gets_both_ends(self):
        spec = ProblemSpec.from_text(a="1", b="1", k="1", h1="1", h2="1")
        grid = GridSpec.build(spec, N=2, delta_v=0.1)
        st = build_stencil(spec, grid)
        F = boundary_vector(spec, st, grid, 0, 1.0)
        assert F.shape == (1,)
        assert F[0] == pytest.approx(-(st.l[0] + st.n[0]), rel=1e-12)


class TestSolve:
    def test_initial_level_is_sampled(self, reference_grid):
        spec = ProblemSpec.from_text(a="z+1", b="(z+1)^2", k="z*(1-z)")
        np.testing.assert_allclose(initial_level(spec, reference_grid(4)), [0.1875, 0.25, 0.1875])

    def test_zero_steps_keep_initial_level(self):
        spec = ProblemSpec.from_text(a="1", b="1", k="z", h2="1")
        history = solve_ibvp(spec, GridSpec(N=4, M=0, delta_z=0.25, delta_v=0.1))
        assert history.levels.shape == (1, 3)
        np.testing.assert_array_equal(history.final, [0.25, 0.5, 0.75])

    @pytest.mark.parametrize("theta", [1.0, 0.5])
    def test_constant_state_preserved(self, theta: float):
        spec = ProblemSpec.from_text(a="z+1", b="(z+1)^2", k="1", h1="1", h2="1")
        history = solve_ibvp(spec, GridSpec.build(spec, N=10, M=20, theta=theta))
        np.testing.assert_allclose(history.levels, 1.0, rtol=1e-12)

    def test_step_reuses_factorization(self, reference_stencil, rng: np.random.Generator):
        sm = assemble_matrices(reference_stencil(7), 1.0)
        U, F = rng.normal(size=6), np.zeros(6)
        np.testing.assert_allclose(advance_step(sm, U, F), advance_step(sm, U, F, sm.factor()), rtol=1e-15)

    def test_profile_includes_boundaries(self):
        spec, _ = decaying_linear_problem()
        history = solve_ibvp(spec, GridSpec.build(spec, N=4, M=5))
        profile = history.profile(0)
        assert list(profile.columns) == ["z", "u"]
        np.testing.assert_allclose(profile["u"], [1.0, 1.25, 1.5, 1.75, 2.0], rtol=1e-14)
        with pytest.raises(IndexError):
            history.profile(6)

    def test_max_norms(self):
        spec, _ = decaying_linear_problem()
        history = solve_ibvp(spec, GridSpec.build(spec, N=4, M=5))
        norms = history.max_norms()
        assert norms.shape == (6,)
        assert norms[0] == pytest.approx(1.75)
        assert np.all(np.diff(norms) < 0)


class TestAccuracy:
    def test_crank_nicolson_on_coarse_grid(self):
        spec, exact = decaying_linear_problem()
        history = solve_ibvp(spec, GridSpec.build(spec, N=8, M=1000, theta=0.5))
        assert max_error(history, exact) <= 1e-6


class TestBoundedGrowth:
    def test_forced_data_does_not_decay(self):
        spec = forced_oscillation_problem()
        history = solve_ibvp(spec, GridSpec.build(spec, N=10, M=20))
        assert history.max_norms()[0] == pytest.approx(2.0, rel=1e-12)
        assert np.max(np.abs(history.final)) > 0.1
        assert growth_excess(history) <= 0

    @pytest.mark.parametrize("theta", [1.0, 0.5])
    @pytest.mark.parametrize("mesh_ratio", [0.1, 1.0, 10.0, 100.0])
    def test_thousand_steps_across_mesh_ratios(self, theta: float, mesh_ratio: float):
        assert bounded_growth_run(20, 1000, theta, mesh_ratio) <= 1e-8

    @pytest.mark.slow
    @pytest.mark.parametrize("theta", [1.0, 0.5])
    def test_hundred_intervals_thousand_steps(self, theta: float):
        assert bounded_growth_run(100, 1000, theta) <= 1e-8
