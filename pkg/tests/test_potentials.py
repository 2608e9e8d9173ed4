import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import e, epsilon_0, m_e

from chargequbit.fields import ConfigurationError, ScalarField, make_grid
from chargequbit.potentials import (
    CnotGeometry,
    DoubleWellParams,
    QuarticParams,
    confinement_omega,
    coulomb_constant,
    coulomb_field_from_density,
    coulomb_point_estimate,
    double_well_potential,
    quartic_potential,
)

NM = 1e-9
GRID = make_grid(30, 20, 0.5)


def point_mass(grid, x, y):
    """Unit-charge density concentrated on one node."""
    v = np.zeros(grid.shape)
    j, i = grid.nearest_node(x, y)
    v[j, i] = 1.0 / grid.cell_area
    return ScalarField(grid, v, "density")


def gaussian_density(grid, x0, sigma):
    X, Y = grid.mesh()
    v = np.exp(-((X - x0) ** 2 + Y**2) / (2 * sigma**2))
    v[0, :] = v[-1, :] = v[:, 0] = v[:, -1] = 0.0
    return ScalarField(grid, v / (v.sum() * grid.cell_area), "density")


class TestDoubleWell:
    def test_origin_is_barrier(self):
        p = DoubleWellParams()
        V = double_well_potential(p, GRID)
        j, i = GRID.origin_index
        assert V.values[j, i] == pytest.approx(1.5e-19, rel=1e-15)

    def test_symmetry(self):
        V = double_well_potential(DoubleWellParams(w=0.17), GRID).values
        assert np.array_equal(V, V[:, ::-1])
        assert np.array_equal(V, V[::-1, :])

    def test_at_barrier_width(self):
        p = DoubleWellParams(w=0.2)
        grid = make_grid(30, 20, 0.5)
        i = int(np.argmin(abs(grid.x - p.barrier_width_nm)))
        j, _ = grid.origin_index
        x = p.barrier_width_nm * NM
        expected = 0.5 * p.m_eff * p.omega**2 * x * x + p.V_B / np.e
        assert double_well_potential(p, grid).values[j, i] == pytest.approx(expected, rel=1e-12)

    def test_omega_convention(self):
        p = DoubleWellParams()
        assert 0.5 * p.m_eff * p.omega**2 * (p.l * NM) ** 2 == pytest.approx(p.V_B, rel=1e-12)

    def test_replace_keeps_confinement(self):
        p = DoubleWellParams()
        q = dataclasses.replace(p, V_B=0.5 * p.V_B)
        assert q.omega == p.omega

    def test_minima_off_axis(self):
        p = DoubleWellParams(w=0.2)
        V = double_well_potential(p, GRID)
        j, i = np.unravel_index(np.argmin(V.values), V.values.shape)
        assert GRID.y[j] == 0.0
        assert abs(GRID.x[i]) == pytest.approx(p.minimum_x(), abs=GRID.step)
        assert V.values[j, i] < V.values[GRID.origin_index]

    def test_zero_barrier_needs_fixed_omega(self):
        p = DoubleWellParams()
        flat = dataclasses.replace(p, V_B=0.0)
        assert flat.omega == p.omega and flat.minimum_x() == 0.0
        with pytest.raises(ConfigurationError):
            DoubleWellParams(V_B=0.0)

    @pytest.mark.parametrize("kw", [dict(w=0), dict(w=1.2), dict(V_B=-1.0), dict(l=0)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigurationError):
            DoubleWellParams(**kw)


class TestQuartic:
    p = QuarticParams(m=0.065 * m_e, omega=1e13, a=8.0)

    def test_minima(self):
        V = quartic_potential(self.p, GRID)
        j, _ = GRID.origin_index
        for x in (-8.0, 8.0):
            i = GRID.nearest_node(x, 0.0)[1]
            assert V.values[j, i] == pytest.approx(0.0, abs=1e-40)

    def test_centre(self):
        V = quartic_potential(self.p, GRID)
        expected = self.p.m * self.p.omega**2 * (self.p.a * NM) ** 2 / 8
        assert V.values[GRID.origin_index] == pytest.approx(expected, rel=1e-12)

    def test_separable_in_y(self):
        V = quartic_potential(self.p, GRID).values
        j0, _ = GRID.origin_index
        Y = GRID.y[:, None] * NM
        expected = 0.5 * self.p.m * self.p.omega**2 * Y**2
        np.testing.assert_allclose(V - V[j0], np.broadcast_to(expected, V.shape), rtol=1e-10, atol=1e-35)


class TestPointEstimate:
    def test_eleven_mev_at_ten_nm(self):
        # Effective distance y + R + r/2 = 10 nm.
        geom = CnotGeometry(R=8.0, r=4.0)
        E = coulomb_point_estimate(0.0, geom, +1)
        assert E / e * 1e3 == pytest.approx(11.25, rel=1e-3)

    def test_states_differ_by_r(self):
        geom = CnotGeometry(R=40.0, r=20.0)
        k = coulomb_constant(geom.kappa) / NM
        d0 = k / coulomb_point_estimate(3.0, geom, +1)
        d1 = k / coulomb_point_estimate(3.0, geom, -1)
        assert d0 - d1 == pytest.approx(20.0, rel=1e-12)

    def test_decreasing_in_R(self):
        vals = [coulomb_point_estimate(0.0, CnotGeometry(R=R, r=10.0), -1) for R in (20, 40, 80)]
        assert vals[0] > vals[1] > vals[2]

    def test_negative_distance(self):
        with pytest.raises(ValueError):
            coulomb_point_estimate(-50.0, CnotGeometry(R=40.0, r=10.0), +1)

    def test_geometry_invariant(self):
        with pytest.raises(ConfigurationError):
            CnotGeometry(R=5.0, r=12.0)


class TestCoulombField:
    grid = make_grid(30, 20, 1.0)

    def test_point_mass_exact(self):
        geom = CnotGeometry(R=40.0, r=10.0)
        rho = point_mass(self.grid, 0.0, 0.0)
        V = coulomb_field_from_density(rho, geom, self.grid)
        X, Y = self.grid.mesh()
        d = np.hypot(X, Y + 40.0) * NM
        np.testing.assert_allclose(V.values, coulomb_constant(12.8) / d, rtol=1e-12)

    @pytest.mark.parametrize("s", [+1, -1])
    def test_localized_matches_point_estimate(self, s):
        # Control |0> maximum sits at +r/2 in the control frame.
        geom = CnotGeometry(R=40.0, r=16.0)
        rho = point_mass(self.grid, s * geom.r / 2, 0.0)
        V = coulomb_field_from_density(rho, geom, self.grid)
        j_axis = self.grid.origin_index[1]
        for j, y in enumerate(self.grid.y):
            assert V.values[j, j_axis] == pytest.approx(coulomb_point_estimate(y, geom, s), rel=0.02)

    def test_far_field_monopole(self):
        grid = make_grid(8, 8, 0.5)
        rho = gaussian_density(grid, 0.0, 2.0)
        geom = CnotGeometry(R=200.0, r=4.0)
        V = coulomb_field_from_density(rho, geom, grid)
        X, Y = grid.mesh()
        d = np.hypot(X, Y + 200.0) * NM
        np.testing.assert_allclose(V.values, coulomb_constant(12.8) / d, rtol=1e-2)

    def test_even_source_gives_even_field(self):
        # Even in the control x-axis maps onto y-reflection about y=-R; the
        # target field stays even in target x either way.
        rho = gaussian_density(self.grid, 0.0, 3.0)
        V = coulomb_field_from_density(rho, CnotGeometry(R=40.0, r=10.0), self.grid).values
        np.testing.assert_allclose(V, V[:, ::-1], rtol=1e-12)

    def test_asymmetric_source_keeps_x_symmetry(self):
        rho = gaussian_density(self.grid, 6.0, 3.0)
        V = coulomb_field_from_density(rho, CnotGeometry(R=40.0, r=12.0), self.grid).values
        np.testing.assert_allclose(V, V[:, ::-1], rtol=1e-10)

    def test_positive_and_bounded(self):
        geom = CnotGeometry(R=40.0, r=12.0)
        rho = gaussian_density(self.grid, 6.0, 3.0)
        V = coulomb_field_from_density(rho, geom, self.grid).values
        # Pairs closer than h/2 are excluded, so no term exceeds k / (h/2).
        assert (V > 0).all()
        assert V.max() <= coulomb_constant(12.8) / (0.5 * NM)

    def test_unnormalized_density(self):
        rho = ScalarField(self.grid, 2 * gaussian_density(self.grid, 0.0, 3.0).values, "density")
        with pytest.raises(ValueError):
            coulomb_field_from_density(rho, CnotGeometry(R=40.0, r=10.0), self.grid)

    def test_overlap_detected(self):
        rho = point_mass(self.grid, 0.0, 0.0)
        geom = CnotGeometry(R=10.0, r=4.0)
        with pytest.raises(ConfigurationError):
            coulomb_field_from_density(rho, geom, self.grid)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(30.0, 120.0), st.floats(-12.0, 12.0))
    def test_translation_of_point_mass(self, R, x0):
        grid = make_grid(16, 12, 1.0)
        rho = point_mass(grid, x0, 0.0)
        i = grid.nearest_node(x0, 0.0)[1]
        u = grid.x[i]
        V = coulomb_field_from_density(rho, CnotGeometry(R=R, r=4.0), grid)
        X, Y = grid.mesh()
        d = np.hypot(X, Y + R + u) * NM
        np.testing.assert_allclose(V.values, coulomb_constant(12.8) / d, rtol=1e-12)


def test_confinement_omega_scale():
    w = confinement_omega(0.065 * m_e, 20.0, 1.5e-19)
    assert 0.5 * 0.065 * m_e * w**2 * (20e-9) ** 2 == pytest.approx(1.5e-19, rel=1e-14)


def test_coulomb_constant_si():
    assert coulomb_constant(1.0) == pytest.approx(e**2 / (4 * np.pi * epsilon_0), rel=1e-15)
