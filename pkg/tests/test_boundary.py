import numpy as np
import pytest

import taylormarch as tm
from taylormarch.boundary import (MissingPolicyError, TimeFunction, as_time_function,
                                  exponential_time_function, level_policies)


class TestTimeFunction:
    def test_constant_all_derivatives_zero(self):
        f = as_time_function(3.0)
        assert f(0.7) == 3.0
        assert f.deriv(1)(0.7) == 0.0
        assert f.deriv(4)(0.7) == 0.0

    def test_supplied_derivatives_chain(self):
        f = TimeFunction(lambda t: t, (1.0,))
        assert f.deriv(1)(2.0) == 1.0
        assert f.deriv(2)(2.0) == 0.0
        assert f.deriv(5)(2.0) == 0.0

    def test_missing_derivative_raises(self):
        f = TimeFunction(np.sin)
        with pytest.raises(ValueError):
            f.deriv(1)

    def test_exponential(self):
        f = exponential_time_function(2.0, 100.0)
        t = 0.01
        assert f(t) == pytest.approx(2.0 * np.exp(1.0))
        assert f.deriv(3)(t) == pytest.approx(2.0 * 100.0**3 * np.exp(1.0))


class TestGhostFill:
    def test_dirichlet_zero_on_zero_field(self):
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=3)
        f = tm.fill_ghosts(tm.Field.zeros(grid), {"lo": tm.Dirichlet(0.0), "hi": tm.Dirichlet(0.0)})
        assert np.all(f.values == 0.0)

    def test_dirichlet_sets_boundary_node(self):
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=2)
        f = tm.fill_ghosts(tm.Field.zeros(grid),
                           {"lo": tm.Dirichlet(TimeFunction(lambda t: t)), "hi": tm.Dirichlet(0.0)},
                           t=0.25)
        assert f.interior[0] == 0.25

    def test_symmetry_even_reflection(self):
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=2)
        f = tm.fill_ghosts(tm.Field.from_function(grid, lambda x: x**2),
                           {"lo": tm.Symmetry(), "hi": tm.Symmetry()})
        g = grid.ghost_width
        assert f.values[g - 1] == f.values[g + 1]
        assert f.values[g - 2] == f.values[g + 2]

    def test_neumann_zero_on_constant(self):
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=2)
        f = tm.fill_ghosts(tm.Field.from_function(grid, lambda x: 0 * x + 5.0),
                           {"lo": tm.Neumann(0.0), "hi": tm.Neumann(0.0)})
        assert np.all(f.values == 5.0)

    def test_neumann_linear_exact(self):
        # ghosts of a + g x under Neumann g are exact
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=2)
        f = tm.fill_ghosts(tm.Field.from_function(grid, lambda x: 2.0 + 3.0 * x),
                           {"lo": tm.Neumann(3.0), "hi": tm.Neumann(3.0)})
        np.testing.assert_allclose(f.values, 2.0 + 3.0 * grid.full_coords(), atol=1e-13)

    def test_extrapolation_polynomial_exact(self):
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=3)
        f = tm.fill_ghosts(tm.Field.from_function(grid, lambda x: 1 + x - x**2 + 0.5 * x**3),
                           {"lo": tm.Extrapolation(3), "hi": tm.Extrapolation(3)})
        x = grid.full_coords()
        np.testing.assert_allclose(f.values, 1 + x - x**2 + 0.5 * x**3, atol=1e-12)

    def test_dirichlet_extrapolation_through_boundary_value(self):
        # cubic data consistent with the boundary value: ghosts exact
        grid = tm.Grid1D(0.0, 1.0, 16, ghost_width=2)
        fn = lambda x: 2.0 + x**3  # noqa: E731
        f = tm.fill_ghosts(tm.Field.from_function(grid, fn),
                           {"lo": tm.Dirichlet(2.0, degree=3), "hi": tm.Dirichlet(3.0, degree=3)})
        np.testing.assert_allclose(f.values, fn(grid.full_coords()), atol=1e-12)

    def test_periodic_wrap(self):
        grid = tm.Grid1D(0.0, 2 * np.pi, 8, ghost_width=2, periodic=True)
        vals = np.arange(8.0)
        f = tm.fill_ghosts(tm.Field.from_interior(grid, vals))
        g = grid.ghost_width
        assert f.values[g - 1] == vals[-1]
        assert f.values[g - 2] == vals[-2]
        assert f.values[g + 8] == vals[0]
        assert f.values[g + 9] == vals[1]

    def test_missing_policy_raises(self):
        grid = tm.Grid1D(0.0, 1.0, 8, ghost_width=1)
        with pytest.raises(MissingPolicyError):
            tm.fill_ghosts(tm.Field.zeros(grid), {"lo": tm.Dirichlet(0.0)})

    def test_2d_fill_covers_corners(self):
        grid = tm.Grid2D(0, 1, 8, 0, 1, 8, ghost_width=2)
        pol = {(a, s): tm.Symmetry() for a in (0, 1) for s in ("lo", "hi")}
        f = tm.fill_ghosts(tm.Field.from_function(grid, lambda X, Y: X**2 + Y**2), pol)
        assert np.isfinite(f.values).all()

    def test_level_policies_dirichlet_derivative(self):
        pol = {"lo": tm.Dirichlet(TimeFunction(lambda t: t, (1.0,))), "hi": tm.Dirichlet(5.0)}
        lvl = level_policies(pol, 1)
        assert as_time_function(lvl[(0, "lo")].value)(9.0) == 1.0
        assert as_time_function(lvl[(0, "hi")].value)(9.0) == 0.0

    def test_input_not_mutated(self):
        grid = tm.Grid1D(0.0, 1.0, 8, ghost_width=2)
        f = tm.Field.from_function(grid, lambda x: x)
        before = f.values.copy()
        tm.fill_ghosts(f, {"lo": tm.Dirichlet(0.0), "hi": tm.Dirichlet(1.0)})
        assert np.array_equal(f.values, before)
        assert not f.ghosts_filled
