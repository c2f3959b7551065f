import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moyal_phase import (
    GridMismatch,
    GridSpec1D,
    GridTooSmall,
    InvalidParameter,
    PhaseGridSpec,
    PotentialSpec,
    Wavefunction,
    make_cat,
    make_fock,
    make_gaussian,
    moments_from_wigner,
    wigner_from_wavefunction,
)
from moyal_phase.core import lattice_steps


class TestGridSpec:
    def test_spacing_and_points(self):
        g = GridSpec1D(8, -2.0, 2.0)
        assert g.dx == 0.5
        np.testing.assert_array_equal(g.points, [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5])

    @pytest.mark.parametrize("n", [0, 4, 12, 100])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(InvalidParameter):
            GridSpec1D(n, -1.0, 1.0)

    def test_rejects_reversed_and_non_finite_bounds(self):
        with pytest.raises(InvalidParameter):
            GridSpec1D(8, 1.0, -1.0)
        with pytest.raises(InvalidParameter):
            GridSpec1D(8, -math.inf, 1.0)

    def test_rejects_bool_size(self):
        with pytest.raises(InvalidParameter):
            GridSpec1D(True, 0.0, 1.0)

    def test_dual_grids(self):
        g = GridSpec1D(16, -4.0, 4.0)
        tg = g.tau_grid()
        assert tg.dx == pytest.approx(2 * g.dx)
        assert (tg.x_min, tg.x_max) == (-g.length, g.length)
        pb = g.momentum_band()
        # P grid is the Fourier dual of the tau lattice
        assert pb.dx * tg.dx == pytest.approx(2 * math.pi / g.n_points)
        assert g.theta_grid().dx * g.dx == pytest.approx(2 * math.pi / g.n_points)

    def test_parse(self):
        assert GridSpec1D.parse("128:-6:6") == GridSpec1D(128, -6.0, 6.0)
        for bad in ("128", "a:b:c", "128:1:-1", "7:-1:1"):
            with pytest.raises(ValueError):
                GridSpec1D.parse(bad)

    @given(st.sampled_from([8, 16, 64, 256]), st.floats(-50, 50), st.floats(0.1, 100))
    def test_parse_round_trip(self, n, lo, width):
        g = GridSpec1D(n, lo, lo + width)
        assert GridSpec1D.parse(str(g)).same_as(g)

    def test_index_of_and_lattice_steps(self):
        g = GridSpec1D(16, -4.0, 4.0)
        assert g.index_of(0.0) == 8
        assert lattice_steps(1.5, 0.5) == 3
        with pytest.raises(GridMismatch):
            g.index_of(0.1)


class TestStates:
    def test_gaussian_normalized_and_centred(self, grid):
        psi = make_gaussian(grid, 1.5, -0.7, 1.2)
        assert psi.norm() == pytest.approx(1.0, abs=1e-14)
        assert psi.expectation_x() == pytest.approx(1.5, abs=1e-12)
        # variances of exp(-a^2 x^2/2): 1/(2a^2) and a^2/2
        assert psi.variance_x() == pytest.approx(1 / (2 * 1.44), abs=1e-12)
        assert psi.variance_p() == pytest.approx(1.44 / 2, abs=1e-10)

    def test_gaussian_outside_box(self, grid):
        with pytest.raises(GridTooSmall):
            make_gaussian(grid, 8.0, 0.0, 1.0)

    def test_gaussian_under_resolved_momentum(self, grid):
        with pytest.raises(InvalidParameter, match="under-resolved"):
            make_gaussian(grid, 0.0, 35.0, 1.0)

    @pytest.mark.parametrize("bad", [dict(width_a=0.0), dict(width_a=-1.0), dict(center_x=math.nan)])
    def test_gaussian_invalid(self, grid, bad):
        kw = dict(center_x=0.0, center_p=0.0, width_a=1.0) | bad
        with pytest.raises(InvalidParameter):
            make_gaussian(grid, **kw)

    def test_fock_orthonormal(self, grid):
        states = [make_fock(grid, n) for n in range(6)]
        gram = np.array([[a.inner(b) for b in states] for a in states])
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-13)

    def test_fock_variance(self, grid):
        for n in range(5):
            assert make_fock(grid, n).variance_x() == pytest.approx(n + 0.5, abs=1e-12)

    @pytest.mark.parametrize("n", [-1, 2.5, True, 21])
    def test_fock_invalid_level(self, grid, n):
        with pytest.raises(InvalidParameter):
            make_fock(grid, n)

    def test_fock_too_wide_for_box(self):
        with pytest.raises(GridTooSmall):
            make_fock(GridSpec1D(64, -3.0, 3.0), 4)

    def test_cat_is_even_and_normalized(self, grid):
        psi = make_cat(grid, 6.0)
        assert psi.norm() == pytest.approx(1.0, abs=1e-14)
        assert psi.expectation_x() == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(InvalidParameter):
            make_cat(grid, -1.0)

    def test_wavefunction_is_read_only(self, grid):
        psi = make_fock(grid, 0)
        with pytest.raises(ValueError):
            psi.values[0] = 1.0

    def test_wavefunction_shape_and_finite(self, grid):
        with pytest.raises(GridMismatch):
            Wavefunction(grid, np.zeros(3))
        vals = np.zeros(grid.n_points)
        vals[3] = np.nan
        with pytest.raises(InvalidParameter):
            Wavefunction(grid, vals)

    def test_inner_needs_same_grid(self, grid, small_grid):
        with pytest.raises(GridMismatch):
            make_fock(grid, 0).inner(make_fock(small_grid, 0))


class TestPotential:
    def test_closed_forms(self):
        x = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_allclose(PotentialSpec.harmonic(2.0)(x), [2.0, 0.0, 8.0])
        np.testing.assert_allclose(PotentialSpec.quartic(0.1)(x), [0.1, 0.0, 1.6])
        np.testing.assert_allclose(PotentialSpec.double_well(1.0, 1.0)(x), [0.0, 1.0, 9.0])
        np.testing.assert_allclose(PotentialSpec.linear(-0.5)(x), [0.5, 0.0, -1.0])
        np.testing.assert_array_equal(PotentialSpec.free()(x), 0.0)

    def test_parse(self, small_grid, tmp_path):
        assert PotentialSpec.parse("harmonic:1") == PotentialSpec.harmonic(1.0)
        assert PotentialSpec.parse("double_well:1:2") == PotentialSpec.double_well(1.0, 2.0)
        assert PotentialSpec.parse("free") == PotentialSpec.free()
        path = tmp_path / "v.txt"
        np.savetxt(path, small_grid.points ** 2)
        tab = PotentialSpec.parse(f"tabulated:{path}", small_grid)
        np.testing.assert_allclose(tab(small_grid.points), small_grid.points ** 2)

    @pytest.mark.parametrize("text", ["cubic:1", "harmonic", "harmonic:1:2", "quartic:x", "linear:nan"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidParameter):
            PotentialSpec.parse(text)

    def test_tabulated_wrong_length(self, small_grid):
        with pytest.raises(GridMismatch):
            PotentialSpec.tabulated(np.zeros(3), small_grid)

    def test_tabulated_continues_boundary_values(self, small_grid):
        V = PotentialSpec.tabulated(small_grid.points, small_grid)
        ext = V.on_lattice(small_grid, np.array([-5, 0, small_grid.n_points + 3]))
        np.testing.assert_array_equal(ext, [small_grid.x_min, small_grid.x_min, small_grid.points[-1]])

    def test_max_force(self, small_grid):
        assert PotentialSpec.free().max_force(small_grid) == 0.0
        assert PotentialSpec.linear(0.3).max_force(small_grid) == pytest.approx(0.3)


class TestMoments:
    @settings(max_examples=25, deadline=None)
    # ranges keep the packet inside the box and its P spread inside the Wigner
    # momentum band pi/(2 dx), which is half the wavefunction band
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(1.0, 1.5))
    def test_gaussian_moments(self, x0, p0, a):
        g = GridSpec1D(128, -10.0, 10.0)
        m = moments_from_wigner(wigner_from_wavefunction(make_gaussian(g, x0, p0, a)))
        assert m.norm == pytest.approx(1.0, abs=1e-12)
        assert m.mean_x == pytest.approx(x0, abs=1e-10)
        assert m.mean_p == pytest.approx(p0, abs=1e-10)
        assert m.var_x == pytest.approx(1 / (2 * a * a), abs=1e-10)
        assert m.var_p == pytest.approx(a * a / 2, abs=1e-10)

    def test_phase_grid_is_canonical(self, grid):
        pg = PhaseGridSpec.for_position(grid)
        assert pg.is_canonical()
        assert not PhaseGridSpec(grid, grid).is_canonical()
