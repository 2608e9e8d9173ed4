"""Logical basis, localization and the two-level NOT dynamics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.constants import hbar

from .eigensolver import SpectrumResult
from .fields import ScalarField, node_weights


class ParityError(ValueError):
    """States lack the opposite x-parity needed for the logical basis."""


class UnresolvedDoubletError(ValueError):
    """Tunnel splitting is zero or below the solver's energy resolution."""


@dataclass(frozen=True)
class LogicalState:
    c0: complex
    c1: complex

    def __post_init__(self):
        n = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"|c0|^2 + |c1|^2 = {n}, expected 1")

    @property
    def probabilities(self) -> tuple[float, float]:
        return (abs(self.c0) ** 2, abs(self.c1) ** 2)


@dataclass(frozen=True)
class QubitCharacterization:
    """Gate-relevant numbers of one dot: splitting, NOT time and geometry."""

    eps10: float
    delta_omega: float
    t_not: float
    r: float
    loc0: float
    loc1: float


def x_parity(psi: ScalarField) -> float:
    """+1 for an even, -1 for an odd field in x; in between otherwise."""
    v = psi.values
    return float(np.sum(v * v[:, ::-1]) / np.sum(v * v))


def logical_basis(psi1: ScalarField, psi2: ScalarField, tol: float = 1e-6):
    """``|0> = (psi1 + psi2)/sqrt 2`` and ``|1> = (psi1 - psi2)/sqrt 2``.

    With the solver's sign convention |0> sits in ``x > 0``.
    """
    p1, p2 = x_parity(psi1), x_parity(psi2)
    if abs(abs(p1) - 1) > tol or abs(abs(p2) - 1) > tol or p1 * p2 > 0:
        raise ParityError(f"need opposite x-parity states, got parities {p1:.6g}, {p2:.6g}")
    grid = psi1.grid
    zero = ScalarField(grid, (psi1.values + psi2.values) / np.sqrt(2.0))
    one = ScalarField(grid, (psi1.values - psi2.values) / np.sqrt(2.0))
    if localization(zero, "x>0") < 0.5:
        zero, one = one, zero
    return zero, one


def localization(psi: ScalarField, half: Literal["x>0", "x<0"] = "x>0") -> float:
    """Probability in a half plane; the ``x = 0`` column counts half to each side."""
    if half not in ("x>0", "x<0"):
        raise ValueError(f"half must be 'x>0' or 'x<0', got {half!r}")
    grid = psi.grid
    w = node_weights(grid) * psi.values**2
    c = grid.nx // 2
    mid = 0.5 * w[:, c].sum()
    # Both halves are summed outward from x = 0 so mirror-symmetric states
    # split exactly; dividing by the total absorbs normalization rounding.
    right = w[:, c + 1 :].sum() + mid
    left = w[:, :c][:, ::-1].sum() + mid
    return float((right if half == "x>0" else left) / (left + right))


def _parabolic_offset(fm: float, f0: float, fp: float) -> float:
    denom = fm - 2.0 * f0 + fp
    if denom >= 0:
        return 0.0
    return float(np.clip(0.5 * (fm - fp) / denom, -0.5, 0.5))


def density_maximum(psi: ScalarField) -> tuple[float, float]:
    """Position (nm) of the density maximum, refined by a parabola per axis."""
    grid = psi.grid
    rho = psi.values**2
    j, i = np.unravel_index(int(np.argmax(rho)), rho.shape)
    x = grid.x[i]
    y = grid.y[j]
    if 0 < i < grid.nx - 1:
        x += grid.step * _parabolic_offset(rho[j, i - 1], rho[j, i], rho[j, i + 1])
    if 0 < j < grid.ny - 1:
        y += grid.step * _parabolic_offset(rho[j - 1, i], rho[j, i], rho[j + 1, i])
    return float(x), float(y)


def density_maxima_separation(zero: ScalarField, one: ScalarField) -> float:
    """Distance ``r`` (nm) between the |0> and |1> density maxima."""
    x0, y0 = density_maximum(zero)
    x1, y1 = density_maximum(one)
    if x0 * x1 >= 0:
        raise ValueError(f"density maxima on the same side (x = {x0}, {x1}); basis not localized")
    return float(np.hypot(x0 - x1, y0 - y1))


def evolve(state: LogicalState, omega1: float, omega2: float, t: float) -> LogicalState:
    """Two-level evolution in the (|0>, |1>) basis for time ``t``."""
    if omega2 < omega1:
        raise ValueError("omega2 must not be below omega1")
    half = 0.5 * (omega2 - omega1) * t
    c, s = np.cos(half), np.sin(half)
    phase = np.exp(-0.5j * (omega1 + omega2) * t)
    c0 = phase * (state.c0 * c + 1j * state.c1 * s)
    c1 = phase * (state.c1 * c + 1j * state.c0 * s)
    return LogicalState(complex(c0), complex(c1))


def not_duration(eps10: float) -> float:
    """``pi hbar / eps10``: half the tunnelling period."""
    return float(np.pi * hbar / eps10)


def check_doublet(spectrum: SpectrumResult) -> float:
    """Return ``eps10``, raising when it is not resolved above solver noise."""
    eps10 = spectrum.eps10
    floor = 1e3 * np.finfo(float).eps * abs(spectrum.energies[0])
    if not eps10 > floor:
        raise UnresolvedDoubletError(
            f"eps10 = {eps10:.3e} J is not resolved (floor {floor:.3e} J)"
        )
    return eps10


def characterize(spectrum: SpectrumResult) -> QubitCharacterization:
    eps10 = check_doublet(spectrum)
    zero, one = logical_basis(spectrum.states[0], spectrum.states[1])
    dw = eps10 / hbar
    return QubitCharacterization(
        eps10=eps10,
        delta_omega=dw,
        t_not=np.pi / dw,
        r=density_maxima_separation(zero, one),
        loc0=localization(zero, "x>0"),
        loc1=localization(one, "x<0"),
    )
