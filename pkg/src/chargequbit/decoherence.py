"""Spontaneous-emission rates from the first excited to the ground state.

All rates are in 1/s at zero temperature. Gaussian-unit couplings are carried
over to SI by two substitutions: ``e^2 -> e^2/(4 pi eps0)`` and, for the
piezoelectric field, ``4 pi * e14/kappa0 -> e14/(eps0 kappa0)``.

Phonon rates integrate ``|I(q_par)|^2`` over the emission direction, with the
phonon wavenumber fixed by energy conservation at ``q = eps10/(hbar s)`` and
``q_par = q cos(theta) (cos(phi), sin(phi))``. The polar angle uses
Gauss-Legendre nodes on ``[-pi/2, pi/2]``, the azimuth a periodic trapezoid
rule, and every rate is re-evaluated with doubled node counts as a
convergence check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.constants import c as c_light
from scipy.constants import e, epsilon_0, hbar, m_e

from .eigensolver import SpectrumResult
from .fields import NM, ScalarField

MECHANISMS = ("photon", "deformation", "piezoelectric")


class QuadratureError(RuntimeError):
    pass


class ParityViolationError(ValueError):
    pass


@dataclass(frozen=True)
class Materials:
    """GaAs constants; ``rho`` is not given by the model and defaults to 5317."""

    m_eff: float = 0.065 * m_e
    s: float = 5.2e3
    rho: float = 5317.0
    e14: float = 0.16
    kappa0: float = 12.8
    Xi: float = 7.0 * e
    kappa: float = 12.8
    c: float = c_light

    def __post_init__(self):
        for name in ("m_eff", "s", "rho", "kappa0", "kappa", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("e14", "Xi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def piezo_field(self) -> float:
        """``e14 / (eps0 kappa0)`` in V/m."""
        return self.e14 / (epsilon_0 * self.kappa0)


@dataclass(frozen=True)
class QuadratureSpec:
    n_theta: int = 64
    n_phi: int = 128
    rtol: float = 5e-3

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.n_theta, 2 * self.n_phi, self.rtol)


@dataclass(frozen=True)
class RateBreakdown:
    w_photon: float
    w_photon_bound: float
    w_da: float
    w_pa_t: float
    w_pa_l: float
    total: float
    dominant: str
    literal_longitudinal: bool = False

    @property
    def w_piezo(self) -> float:
        return self.w_pa_t + self.w_pa_l


# ---------------------------------------------------------------------------
# Matrix elements


def form_factor(psi_ground: ScalarField, psi_excited: ScalarField, qx, qy) -> np.ndarray:
    """``I(q) = h^2 sum psi0 psi1 exp(i (qx x + qy y))`` for q in 1/m.

    ``qx`` and ``qy`` may be arrays of equal shape; the plane wave factorizes
    over the two axes so a batch costs one matrix product.
    """
    if psi_ground.grid != psi_excited.grid:
        raise ValueError("states live on different grids")
    grid = psi_ground.grid
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    shape = np.broadcast(qx, qy).shape
    qx = np.broadcast_to(qx, shape).ravel()
    qy = np.broadcast_to(qy, shape).ravel()
    P = psi_ground.values * psi_excited.values * grid.cell_area
    Ex = np.exp(1j * np.outer(grid.x * NM, qx))
    Ey = np.exp(1j * np.outer(grid.y * NM, qy))
    out = np.einsum("jm,jm->m", Ey, P @ Ex)
    return out.reshape(shape)


def dipole_moment_x(psi_ground: ScalarField, psi_excited: ScalarField) -> float:
    """``e <psi0| x |psi1>`` in C*m, after checking the y component vanishes."""
    grid = psi_ground.grid
    X, Y = grid.mesh()
    P = psi_ground.values * psi_excited.values * grid.cell_area
    dx = e * NM * float(np.sum(X * P))
    dy = e * NM * float(np.sum(Y * P))
    floor = 1e-10 * e * NM
    if abs(dy) > 1e-6 * abs(dx) + floor:
        raise ParityViolationError(f"d_y = {dy:.3e} C m is not negligible against d_x = {dx:.3e}")
    return dx


# ---------------------------------------------------------------------------
# Photon


def photon_rate(eps10: float, d_x: float) -> float:
    """Dipole emission rate ``omega^3 |d|^2 / (3 pi eps0 hbar c^3)``."""
    w = eps10 / hbar
    return float(w**3 * d_x**2 / (3.0 * np.pi * epsilon_0 * hbar * c_light**3))


def photon_rate_bound(eps10: float, r: float) -> float:
    """Upper estimate using ``|d_x| <= 2 e r`` (``r`` in nm)."""
    rm = r * NM
    return float(4.0 * eps10**3 * e**2 * rm**2 / (3.0 * np.pi * epsilon_0 * hbar**4 * c_light**3))


# ---------------------------------------------------------------------------
# Phonon polarizations and angular factors


def transverse1(q: np.ndarray) -> np.ndarray:
    """In-plane transverse polarization ``(q_y, -q_x, 0)/q_par``; ``q`` is ``(3, ...)``."""
    qpar = np.hypot(q[0], q[1])
    return np.stack([q[1], -q[0], np.zeros_like(q[0])]) / qpar


def transverse2(q: np.ndarray) -> np.ndarray:
    """Second transverse polarization, orthogonal to ``q`` and :func:`transverse1`."""
    qn = np.sqrt(np.sum(q * q, axis=0))
    qpar = np.hypot(q[0], q[1])
    sign = np.where(q[1] >= 0, 1.0, -1.0)
    return sign * np.stack([q[0] * q[2], q[1] * q[2], -qpar * qpar]) / (qn * qpar)


def longitudinal(q: np.ndarray) -> np.ndarray:
    return q / np.sqrt(np.sum(q * q, axis=0))


def piezo_projection(q: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Dimensionless T_d piezo factor ``e_x e_y d_z + e_y e_z d_x + e_z e_x d_y``."""
    u = q / np.sqrt(np.sum(q * q, axis=0))
    return u[0] * u[1] * d[2] + u[1] * u[2] * d[0] + u[2] * u[0] * d[1]


def direction(theta, phi) -> np.ndarray:
    """Unit wave vector with polar angle measured from the dot plane."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct = np.cos(theta)
    return np.stack([ct * np.cos(phi), ct * np.sin(phi), np.sin(theta)])


def transverse1_factor(theta, phi):
    """Squared T1 coupling in units of ``(e Pi)^2``."""
    return np.cos(theta) ** 2 * np.sin(theta) ** 2 * np.cos(2 * phi) ** 2


def transverse2_factor(theta, phi):
    return (np.cos(theta) + 3 * np.cos(3 * theta)) ** 2 * np.cos(phi) ** 2 * np.sin(phi) ** 2 / 16.0


def transverse_factor_combined(theta, phi):
    """Closed form of ``T1 + T2`` summed over both transverse branches."""
    c2 = np.cos(theta) ** 2
    bracket = (
        4 * (7 - 9 * np.cos(2 * theta)) * np.cos(4 * phi) * c2
        - 28 * np.cos(2 * theta)
        + 9 * np.cos(4 * theta)
        + 27
    )
    return c2 * bracket / 64.0


def transverse_combined_scale(theta, phi):
    """Magnitude of the cancelling terms in :func:`transverse_factor_combined`."""
    c2 = np.cos(theta) ** 2
    return c2 * (
        4 * np.abs(7 - 9 * np.cos(2 * theta)) * np.abs(np.cos(4 * phi)) * c2
        + 28 * np.abs(np.cos(2 * theta))
        + 9 * np.abs(np.cos(4 * theta))
        + 27
    ) / 64.0


def longitudinal_factor(theta, phi):
    return 9.0 * np.cos(theta) ** 4 * np.sin(theta) ** 2 * np.cos(phi) ** 2 * np.sin(phi) ** 2


# ---------------------------------------------------------------------------
# Angular quadrature


def angular_nodes(spec: QuadratureSpec):
    """Nodes and weights on ``[-pi/2, pi/2] x [0, 2 pi)``."""
    xg, wg = leggauss(spec.n_theta)
    theta = 0.5 * np.pi * xg
    wt = 0.5 * np.pi * wg
    phi = 2.0 * np.pi * np.arange(spec.n_phi) / spec.n_phi
    wp = np.full(spec.n_phi, 2.0 * np.pi / spec.n_phi)
    return theta, wt, phi, wp


def emission_integral(
    spectrum: SpectrumResult,
    q: float,
    weight: Callable[[np.ndarray, np.ndarray], np.ndarray],
    spec: QuadratureSpec,
) -> float:
    """``int dtheta dphi weight(theta, phi) |I(q cos theta, phi)|^2``."""
    theta, wt, phi, wp = angular_nodes(spec)
    T, Ph = np.meshgrid(theta, phi, indexing="ij")
    qpar = q * np.cos(T)
    ff = form_factor(spectrum.states[0], spectrum.states[1], qpar * np.cos(Ph), qpar * np.sin(Ph))
    integrand = weight(T, Ph) * np.abs(ff) ** 2
    return float(wt @ integrand @ wp)


def converged_integral(spectrum, q, weight, spec: QuadratureSpec, label: str) -> float:
    coarse = emission_integral(spectrum, q, weight, spec)
    fine = emission_integral(spectrum, q, weight, spec.doubled())
    scale = max(abs(coarse), abs(fine))
    if scale > 0 and abs(fine - coarse) > spec.rtol * scale:
        raise QuadratureError(
            f"{label}: quadrature not converged ({coarse:.6e} vs {fine:.6e} after doubling)"
        )
    return coarse


def phonon_wavenumber(eps10: float, mat: Materials) -> float:
    """Energy-conserving phonon wavenumber ``eps10 / (hbar s)`` in 1/m."""
    return eps10 / (hbar * mat.s)


def _cos_theta(theta, phi):
    return np.cos(theta)


def _eps10(spectrum: SpectrumResult) -> float:
    eps10 = spectrum.eps10
    if not eps10 > 0:
        raise ValueError(f"eps10 must be positive, got {eps10}")
    return eps10


def deformation_prefactor(eps10: float, mat: Materials) -> float:
    """``Xi^2 eps10^3 / (8 pi^2 rho hbar^4 s^5)`` in 1/s."""
    return mat.Xi**2 * eps10**3 / (8.0 * np.pi**2 * mat.rho * hbar**4 * mat.s**5)


def piezo_prefactor(eps10: float, mat: Materials) -> float:
    """``eps10 (e Pi)^2 / (8 pi^2 rho hbar^2 s^3)`` in 1/s."""
    return eps10 * (e * mat.piezo_field) ** 2 / (8.0 * np.pi**2 * mat.rho * hbar**2 * mat.s**3)


def deformation_phonon_rate(
    spectrum: SpectrumResult, mat: Materials, quad: QuadratureSpec = QuadratureSpec()
) -> float:
    eps10 = _eps10(spectrum)
    pref = deformation_prefactor(eps10, mat)
    if pref == 0.0:
        return 0.0
    q = phonon_wavenumber(eps10, mat)
    return pref * converged_integral(spectrum, q, _cos_theta, quad, "deformation")


def piezo_transverse_rate(
    spectrum: SpectrumResult, mat: Materials, quad: QuadratureSpec = QuadratureSpec()
) -> float:
    eps10 = _eps10(spectrum)
    pref = piezo_prefactor(eps10, mat)
    if pref == 0.0:
        return 0.0
    q = phonon_wavenumber(eps10, mat)

    def weight(t, p):
        return np.cos(t) * (transverse1_factor(t, p) + transverse2_factor(t, p))

    return pref * converged_integral(spectrum, q, weight, quad, "piezo transverse")


def piezo_longitudinal_rate(
    spectrum: SpectrumResult,
    mat: Materials,
    quad: QuadratureSpec = QuadratureSpec(),
    literal_longitudinal: bool = False,
) -> float:
    """Longitudinal piezo rate.

    The polar weight is ``cos(theta)`` (solid-angle Jacobian) times the
    ``cos^4`` coupling, i.e. ``cos^5``. ``literal_longitudinal=True`` drops the Jacobian
    and integrates the printed ``cos^4`` form instead.
    """
    eps10 = _eps10(spectrum)
    pref = piezo_prefactor(eps10, mat)
    if pref == 0.0:
        return 0.0
    q = phonon_wavenumber(eps10, mat)
    if literal_longitudinal:
        weight = longitudinal_factor
    else:

        def weight(t, p):
            return np.cos(t) * longitudinal_factor(t, p)

    return pref * converged_integral(spectrum, q, weight, quad, "piezo longitudinal")


def dominant_mechanism(w_photon: float, w_da: float, w_piezo: float) -> str:
    values = (w_photon, w_da, w_piezo)
    return MECHANISMS[int(np.argmax(values))]


def rate_breakdown(
    spectrum: SpectrumResult,
    mat: Materials,
    r: float,
    quad: QuadratureSpec = QuadratureSpec(),
    literal_longitudinal: bool = False,
) -> RateBreakdown:
    """All channels for one spectrum; ``r`` (nm) feeds the photon bound only."""
    eps10 = _eps10(spectrum)
    d_x = dipole_moment_x(spectrum.states[0], spectrum.states[1])
    w_ph = photon_rate(eps10, d_x)
    w_bound = photon_rate_bound(eps10, r)
    w_da = deformation_phonon_rate(spectrum, mat, quad)
    w_t = piezo_transverse_rate(spectrum, mat, quad)
    w_l = piezo_longitudinal_rate(spectrum, mat, quad, literal_longitudinal)
    return RateBreakdown(
        w_photon=w_ph,
        w_photon_bound=w_bound,
        w_da=w_da,
        w_pa_t=w_t,
        w_pa_l=w_l,
        total=w_ph + w_da + w_t + w_l,
        dominant=dominant_mechanism(w_ph, w_da, w_t + w_l),
        literal_longitudinal=literal_longitudinal,
    )
