import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.constants import e, hbar

from chargequbit.eigensolver import SpectrumResult, lowest_states
from chargequbit.fields import ScalarField, inner_product, make_grid
from chargequbit.potentials import DoubleWellParams, double_well_potential
from chargequbit.qubit import (
    LogicalState,
    ParityError,
    UnresolvedDoubletError,
    characterize,
    check_doublet,
    density_maxima_separation,
    evolve,
    localization,
    logical_basis,
    not_duration,
    x_parity,
)

angles = st.floats(0, 2 * np.pi)
freqs = st.floats(0, 1e12)
times = st.floats(0, 1e-9)


@st.composite
def logical_states(draw):
    theta, phi, chi = draw(angles), draw(angles), draw(angles)
    return LogicalState(np.cos(theta / 2) * np.exp(1j * chi), np.sin(theta / 2) * np.exp(1j * phi))


def amplitudes(s):
    return np.array([s.c0, s.c1])


def gaussian(grid, x0):
    X, Y = grid.mesh()
    v = np.exp(-((X - x0) ** 2 + Y**2) / 4.0)
    v[0, :] = v[-1, :] = v[:, 0] = v[:, -1] = 0.0
    return ScalarField(grid, v).normalized()


class TestLogicalBasis:
    def test_orthonormal(self, small_double_well):
        zero, one = logical_basis(*small_double_well.states[:2])
        assert abs(inner_product(zero, one)) < 1e-10
        assert inner_product(zero, zero) == pytest.approx(1.0, abs=1e-10)
        assert inner_product(one, one) == pytest.approx(1.0, abs=1e-10)

    def test_density_sum(self, small_double_well):
        p1, p2 = small_double_well.states[:2]
        zero, one = logical_basis(p1, p2)
        np.testing.assert_allclose(
            zero.values**2 + one.values**2, p1.values**2 + p2.values**2, atol=1e-14 * (p1.values**2).max()
        )

    def test_zero_sits_right(self, small_double_well):
        zero, one = logical_basis(*small_double_well.states[:2])
        assert localization(zero, "x>0") > 0.5
        assert localization(one, "x<0") > 0.5

    def test_order_independent(self, small_double_well):
        p1, p2 = small_double_well.states[:2]
        neg = ScalarField(p2.grid, -p2.values)
        zero, _ = logical_basis(p1, neg)
        assert localization(zero, "x>0") > 0.5

    def test_same_parity_rejected(self, small_double_well):
        s = small_double_well.states
        with pytest.raises(ParityError):
            logical_basis(s[0], s[0])

    def test_default_localization(self, default_spectrum):
        zero, one = logical_basis(*default_spectrum.states[:2])
        assert localization(zero, "x>0") > 0.95
        assert localization(one, "x<0") > 0.95


class TestLocalization:
    grid = make_grid(10.0, 6.0, 0.5)

    def test_even_is_half(self):
        assert localization(gaussian(self.grid, 0.0), "x>0") == 0.5

    def test_point_mass(self):
        v = np.zeros(self.grid.shape)
        v[6, 30] = 1.0
        psi = ScalarField(self.grid, v).normalized()
        assert localization(psi, "x>0") == pytest.approx(1.0, abs=1e-15)

    @given(st.floats(-6.0, 6.0))
    def test_complete(self, x0):
        psi = gaussian(self.grid, x0)
        assert localization(psi, "x>0") + localization(psi, "x<0") == pytest.approx(1.0, abs=1e-12)

    def test_bad_half(self):
        with pytest.raises(ValueError):
            localization(gaussian(self.grid, 0.0), "up")


class TestSeparation:
    grid = make_grid(15.0, 8.0, 0.5)

    @given(st.floats(2.0, 10.0))
    def test_gaussian_pair(self, a):
        # The quadratic refinement recovers sub-grid peak positions.
        r = density_maxima_separation(gaussian(self.grid, a), gaussian(self.grid, -a))
        assert r == pytest.approx(2 * a, abs=0.05)

    def test_same_side(self):
        with pytest.raises(ValueError):
            density_maxima_separation(gaussian(self.grid, 3.0), gaussian(self.grid, 5.0))


class TestEvolve:
    @given(logical_states(), freqs, freqs)
    def test_identity_at_zero(self, s, w1, dw):
        out = evolve(s, w1, w1 + dw, 0.0)
        np.testing.assert_allclose(amplitudes(out), amplitudes(s), atol=1e-15)

    @given(logical_states(), freqs, st.floats(1e6, 1e12))
    def test_not_swaps(self, s, w1, dw):
        out = evolve(s, w1, w1 + dw, np.pi / dw)
        assert abs(out.c0) == pytest.approx(abs(s.c1), abs=1e-12)
        assert abs(out.c1) == pytest.approx(abs(s.c0), abs=1e-12)

    @given(logical_states(), freqs, st.floats(1e6, 1e12))
    def test_period(self, s, w1, dw):
        out = evolve(s, w1, w1 + dw, 2 * np.pi / dw)
        overlap = abs(np.vdot(amplitudes(s), amplitudes(out)))
        assert overlap == pytest.approx(1.0, abs=1e-12)

    @given(logical_states(), freqs, freqs, times)
    def test_unitary(self, s, w1, dw, t):
        out = evolve(s, w1, w1 + dw, t)
        assert sum(out.probabilities) == pytest.approx(1.0, abs=1e-14)

    @given(logical_states(), freqs, times)
    def test_common_frequency_phase_only(self, s, w, t):
        out = evolve(s, w, w, t)
        np.testing.assert_allclose(out.probabilities, s.probabilities, atol=1e-14)

    @given(logical_states(), freqs, st.floats(0, 1e11), times, times)
    def test_composition(self, s, w1, dw, t1, t2):
        a = evolve(evolve(s, w1, w1 + dw, t1), w1, w1 + dw, t2)
        b = evolve(s, w1, w1 + dw, t1 + t2)
        np.testing.assert_allclose(amplitudes(a), amplitudes(b), atol=1e-12)

    @given(logical_states(), st.floats(1e6, 1e12))
    def test_not_twice(self, s, dw):
        t = np.pi / dw
        out = evolve(evolve(s, 0.0, dw, t), 0.0, dw, t)
        np.testing.assert_allclose(out.probabilities, s.probabilities, atol=1e-12)

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            evolve(LogicalState(1.0, 0.0), 2.0, 1.0, 1.0)

    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            LogicalState(1.0, 1.0)


class TestTiming:
    def test_four_microvolt_splitting(self):
        # pi * hbar / (4.136 ueV), evaluated independently: 4.99959e-10 s.
        assert not_duration(4.136e-6 * e) == pytest.approx(4.99959e-10, rel=1e-5)

    def test_one_nanosecond(self):
        assert not_duration(hbar * np.pi * 1e9) == pytest.approx(1e-9, rel=1e-15)

    def fake_spectrum(self, energies, small):
        return dataclasses.replace(small, energies=np.asarray(energies, float), splitting=None)

    def test_unresolved_doublet(self, small_double_well):
        E = small_double_well.energies[0]
        with pytest.raises(UnresolvedDoubletError):
            check_doublet(self.fake_spectrum([E, E, 2 * E, 3 * E], small_double_well))
        with pytest.raises(UnresolvedDoubletError):
            check_doublet(self.fake_spectrum([E, E * (1 + 1e-15), 2 * E, 3 * E], small_double_well))

    def test_characterize_consistent(self, small_double_well):
        q = characterize(small_double_well)
        assert q.t_not == pytest.approx(np.pi / q.delta_omega, rel=1e-15)
        assert q.eps10 == pytest.approx(hbar * q.delta_omega, rel=1e-15)
        assert 0.5 <= q.loc0 <= 1 and 0.5 <= q.loc1 <= 1


def test_parity_of_states(small_double_well):
    s = small_double_well.states
    assert x_parity(s[0]) == pytest.approx(1.0, abs=1e-10)
    assert x_parity(s[1]) == pytest.approx(-1.0, abs=1e-10)


def test_sweep_trends():
    """r grows with w, and t_NOT with r (coarse h = 1 nm, full domain)."""
    grid = make_grid(30, 20, 1.0)
    rows = []
    for w in np.linspace(0.08, 0.34, 6):
        dw = DoubleWellParams(w=w)
        spec = lowest_states(double_well_potential(dw, grid), dw.m_eff, tol=1e-9)
        rows.append(characterize(spec))
    r = [q.r for q in rows]
    t = [q.t_not for q in rows]
    assert np.all(np.diff(r) > 0)
    assert np.all(np.diff(t) > 0)


def test_spectrum_result_is_immutable(small_double_well):
    with pytest.raises(dataclasses.FrozenInstanceError):
        small_double_well.iterations = 0
    assert isinstance(small_double_well, SpectrumResult)
