import numpy as np
import pytest

import taylormarch as tm


class TestGrid1D:
    def test_spacing_and_nodes(self):
        g = tm.Grid1D(0.0, 1.0, 10, ghost_width=2)
        assert g.h == pytest.approx(0.1)
        assert g.n_nodes == 11
        assert g.full_shape == (15,)
        np.testing.assert_allclose(g.coords()[[0, -1]], [0.0, 1.0])

    def test_periodic_drops_duplicate_node(self):
        g = tm.Grid1D(0.0, 2 * np.pi, 8, ghost_width=1, periodic=True)
        assert g.n_nodes == 8
        assert g.coords()[-1] < 2 * np.pi

    @pytest.mark.parametrize("kwargs", [
        dict(x_min=1.0, x_max=0.0, n_cells=4),
        dict(x_min=0.0, x_max=1.0, n_cells=1),
        dict(x_min=0.0, x_max=1.0, n_cells=4, ghost_width=0),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            tm.Grid1D(**kwargs)


class TestGrid2D:
    def test_shapes(self):
        g = tm.Grid2D(0, 1, 4, 0, 2, 8, ghost_width=2, periodic_x=True)
        assert g.shape == (4, 9)
        assert g.full_shape == (8, 13)
        assert g.spacing(0) == pytest.approx(0.25)
        assert g.spacing(1) == pytest.approx(0.25)
        assert g.is_periodic(0) and not g.is_periodic(1)

    def test_validation(self):
        with pytest.raises(ValueError):
            tm.Grid2D(0, 0, 4, 0, 1, 4)


class TestSphericalGrid2D:
    def test_endpoints_exact(self):
        g = tm.SphericalGrid2D(rho_max=12.0, n_rho=44, n_theta=20)
        rho = g.coords(0)
        theta = g.coords(1)
        assert rho[0] == 1.0 and rho[-1] == 12.0
        assert theta[0] == 0.0 and theta[-1] == np.pi

    def test_rho_min_fixed(self):
        g = tm.SphericalGrid2D(rho_max=5.0, n_rho=8, n_theta=4)
        assert g.rho_min == 1.0
        with pytest.raises(ValueError):
            tm.SphericalGrid2D(rho_max=0.5, n_rho=8, n_theta=4)


class TestField:
    def test_shape_checked(self):
        g = tm.Grid1D(0.0, 1.0, 8, ghost_width=2)
        with pytest.raises(ValueError):
            tm.Field(g, np.zeros(5))
        with pytest.raises(ValueError):
            tm.Field.from_interior(g, np.zeros(5))

    def test_interior_view_writes_through(self):
        g = tm.Grid1D(0.0, 1.0, 8, ghost_width=2)
        f = tm.Field.zeros(g)
        f.interior[...] = 7.0
        assert f.values[g.ghost_width] == 7.0
        assert f.values[0] == 0.0  # ghosts untouched

    def test_finiteness_diagnostics(self):
        g = tm.Grid1D(0.0, 1.0, 8, ghost_width=2)
        f = tm.Field.from_interior(g, np.linspace(-2, 3, 9))
        assert f.is_finite()
        assert f.max_abs() == 3.0
        f.interior[0] = np.inf
        assert not f.is_finite()

    def test_arithmetic_clears_ghost_flag(self):
        g = tm.Grid1D(0.0, 2 * np.pi, 8, ghost_width=1, periodic=True)
        f = tm.fill_ghosts(tm.Field.from_function(g, np.sin))
        assert f.ghosts_filled
        assert not (2.0 * f).ghosts_filled
        assert not (f + f).ghosts_filled

    def test_stencil_spec_self_check(self):
        spec = tm.make_stencil(3, 4)
        assert spec.max_monomial_error() < 1e-12
        assert spec.exactness_degree() == 6
