"""Confinement potentials and the Coulomb field of a neighbouring dot."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import e, epsilon_0, m_e

from .fields import NM, ConfigurationError, Grid, ScalarField, inner_product

log = logging.getLogger(__name__)

# GaAs defaults.
M_EFF = 0.065 * m_e
L_NM = 20.0
V_B = 1.5e-19
KAPPA = 12.8


def confinement_omega(m_eff: float, l_nm: float, energy: float) -> float:
    """Harmonic frequency whose potential reaches ``energy`` at radius ``l``.

    ``m omega^2 l^2 / 2 = energy``. With the GaAs defaults and ``energy = V_B``
    this gives hbar*omega ~ 74 meV (oscillator length ~ 4 nm).
    """
    return float(np.sqrt(2.0 * energy / m_eff) / (l_nm * NM))


@dataclass(frozen=True)
class DoubleWellParams:
    """Parameters of ``m w^2 (x^2+y^2)/2 + V_B exp(-x^2/(w l)^2)``.

    ``omega`` is derived from ``l`` and the barrier height at construction
    (see :func:`confinement_omega`) and then kept: ``dataclasses.replace`` with
    a new ``V_B`` lowers the barrier without touching the harmonic confinement.
    """

    m_eff: float = M_EFF
    l: float = L_NM
    V_B: float = V_B
    w: float = 0.2
    omega: float | None = None

    def __post_init__(self):
        for name in ("m_eff", "l", "w"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        # A zero barrier is allowed once omega is fixed (pure oscillator).
        if not (self.V_B > 0 or (self.V_B == 0 and self.omega is not None)):
            raise ConfigurationError(f"V_B must be positive, got {self.V_B}")
        if not self.w < 1:
            raise ConfigurationError(f"w must lie in (0, 1), got {self.w}")
        if self.omega is None:
            object.__setattr__(self, "omega", confinement_omega(self.m_eff, self.l, self.V_B))
        elif not self.omega > 0:
            raise ConfigurationError(f"omega must be positive, got {self.omega}")

    @property
    def barrier_width_nm(self) -> float:
        return self.w * self.l

    def minimum_x(self) -> float:
        """Position (nm) of the right-hand potential minimum on ``y = 0``.

        Zero when the barrier is too weak to split the well.
        """
        k = self.m_eff * self.omega**2
        b = self.barrier_width_nm * NM
        ratio = 2.0 * self.V_B / (k * b * b)
        if ratio <= 1.0:
            return 0.0
        return float(b * np.sqrt(np.log(ratio)) / NM)


@dataclass(frozen=True)
class QuarticParams:
    m: float
    omega: float
    a: float

    def __post_init__(self):
        for name in ("m", "omega", "a"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")


@dataclass(frozen=True)
class CnotGeometry:
    """Placement of the control dot relative to the target (nm).

    The control dot sits at ``(0, -R)`` in the target frame, rotated by 90
    degrees, with its own +x axis pointing away from the target: the control
    |0> maximum is ``R + r/2`` from the target centre and |1> is ``R - r/2``.
    """

    R: float
    r: float
    kappa: float = KAPPA
    orientation: str = field(default="control |1> nearer (R - r/2)", compare=False)

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigurationError(f"r must be positive, got {self.r}")
        if not self.R > self.r / 2:
            raise ConfigurationError(f"need R > r/2, got R={self.R}, r={self.r}")
        if not self.kappa > 0:
            raise ConfigurationError("kappa must be positive")


def coulomb_constant(kappa: float) -> float:
    """``e^2 / (4 pi eps0 kappa)`` in J*m."""
    return e * e / (4.0 * np.pi * epsilon_0 * kappa)


def double_well_potential(p: DoubleWellParams, grid: Grid) -> ScalarField:
    X, Y = grid.mesh()
    X = X * NM
    Y = Y * NM
    b = p.barrier_width_nm * NM
    V = 0.5 * p.m_eff * p.omega**2 * (X * X + Y * Y) + p.V_B * np.exp(-(X * X) / (b * b))
    return ScalarField(grid, V, "potential")


def quartic_potential(p: QuarticParams, grid: Grid) -> ScalarField:
    """Double well with minima at ``(+-a, 0)``."""
    X, Y = grid.mesh()
    X = X * NM
    Y = Y * NM
    a = p.a * NM
    V = 0.5 * p.m * p.omega**2 * ((X * X - a * a) ** 2 / (4.0 * a * a) + Y * Y)
    return ScalarField(grid, V, "potential")


def coulomb_point_estimate(y: float, geom: CnotGeometry, s: int) -> float:
    """Barrier-line Coulomb energy (J) from a control electron point charge.

    ``s = +1`` for control |0>, ``-1`` for |1>; ``y`` in nm along the
    target's x = 0 line.
    """
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    d = y + geom.R + s * geom.r / 2.0
    if d <= 0:
        raise ValueError(f"non-positive point-charge distance {d} nm")
    return coulomb_constant(geom.kappa) / (d * NM)


def control_source_positions(control_grid: Grid, R: float) -> tuple[np.ndarray, np.ndarray]:
    """Target-frame coordinates (nm) of every control-grid node."""
    U, Vc = control_grid.mesh()
    return -Vc, -R - U


def coulomb_field_from_density(
    control_density: ScalarField,
    geom: CnotGeometry,
    target_grid: Grid,
    chunk: int = 256,
) -> ScalarField:
    """Potential energy (J) on ``target_grid`` from a frozen control density.

    Direct Coulomb sum over every control node, each carrying charge
    ``e * rho * h^2``. Source-target pairs closer than ``h/2`` are skipped;
    if such pairs carry non-negligible charge the dots overlap and a
    :class:`ConfigurationError` is raised.
    """
    weight = inner_product(control_density, ScalarField(control_density.grid, np.ones(control_density.grid.shape), "density"))
    if abs(weight - 1.0) > 1e-6:
        raise ValueError(f"control density is not normalized (integral {weight})")

    cg = control_density.grid
    sx, sy = control_source_positions(cg, geom.R)
    q = (control_density.values * cg.cell_area).ravel()
    keep = q != 0.0
    sx, sy, q = sx.ravel()[keep], sy.ravel()[keep], q[keep]

    TX, TY = target_grid.mesh()
    tx, ty = TX.ravel(), TY.ravel()
    cutoff = 0.5 * min(cg.step, target_grid.step)
    out = np.empty(tx.size)
    skipped = 0.0
    for start in range(0, tx.size, chunk):
        sl = slice(start, start + chunk)
        d = np.hypot(tx[sl, None] - sx[None, :], ty[sl, None] - sy[None, :])
        near = d < cutoff
        if near.any():
            skipped = max(skipped, float((near * q[None, :]).sum(axis=1).max()))
            d[near] = np.inf
        out[sl] = (q[None, :] / d).sum(axis=1)
    if skipped > 1e-6:
        raise ConfigurationError(
            f"control and target dots overlap (up to {skipped:.3g} e skipped at one node)"
        )
    if skipped > 0:
        log.debug("skipped coincident node pairs carrying at most %.3g e", skipped)
    out *= coulomb_constant(geom.kappa) / NM
    return ScalarField(target_grid, out.reshape(target_grid.shape), "potential")
