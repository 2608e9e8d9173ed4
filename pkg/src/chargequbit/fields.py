"""Uniform 2D mesh, real fields on it, and the discrete Hamiltonian.

Lengths are given in nm at the interface. Amplitude fields carry units of
nm^-1 so that ``h**2 * sum(psi**2) == 1`` with ``h`` in nm; energies are in J.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.constants import hbar

NM = 1e-9

FieldKind = Literal["potential", "amplitude", "density"]


class ConfigurationError(ValueError):
    """Invalid geometry or parameter set."""


class GridMismatchError(ValueError):
    """Two fields live on different grids."""


@dataclass(frozen=True)
class Grid:
    """Node-centred rectangular mesh including the boundary nodes.

    Nodes span ``[-half_width_x, half_width_x] x [-half_width_y, half_width_y]``
    (nm) with spacing ``step``; ``nx`` and ``ny`` are always odd so the origin
    is a node.
    """

    half_width_x: float
    half_width_y: float
    step: float
    nx: int
    ny: int

    @property
    def x(self) -> np.ndarray:
        """Node x coordinates in nm."""
        return -self.half_width_x + self.step * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -self.half_width_y + self.step * np.arange(self.ny)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, Y)`` coordinate arrays in nm, shaped ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y)

    @property
    def cell_area(self) -> float:
        return self.step * self.step

    @property
    def origin_index(self) -> tuple[int, int]:
        return (self.ny // 2, self.nx // 2)

    def nearest_node(self, x: float, y: float) -> tuple[int, int]:
        """Row/column index of the node closest to ``(x, y)`` nm."""
        i = int(np.clip(np.rint((x + self.half_width_x) / self.step), 0, self.nx - 1))
        j = int(np.clip(np.rint((y + self.half_width_y) / self.step), 0, self.ny - 1))
        return (j, i)


def _node_count(half_width: float, step: float, axis: str) -> int:
    if half_width <= 0:
        raise ConfigurationError(f"{axis}: half width must be positive, got {half_width}")
    ratio = 2.0 * half_width / step
    n = int(round(ratio))
    if n < 2 or abs(ratio - n) > 1e-9 * ratio:
        raise ConfigurationError(
            f"{axis}: extent {2 * half_width} nm is not divisible by step {step} nm"
        )
    if n % 2:
        raise ConfigurationError(
            f"{axis}: extent {2 * half_width} nm / step {step} nm gives an odd "
            "interval count; the origin would not be a node"
        )
    return n + 1


def make_grid(half_width_x: float, half_width_y: float, step: float) -> Grid:
    """Build the mesh, e.g. ``make_grid(30, 20, 0.5)`` -> 121 x 81 nodes."""
    if step <= 0:
        raise ConfigurationError(f"step must be positive, got {step}")
    nx = _node_count(half_width_x, step, "x")
    ny = _node_count(half_width_y, step, "y")
    return Grid(float(half_width_x), float(half_width_y), float(step), nx, ny)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values on every node of ``grid``, shaped ``(ny, nx)``."""

    grid: Grid
    values: np.ndarray
    kind: FieldKind = "amplitude"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ConfigurationError(
                f"values shape {v.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        if self.kind == "amplitude" and _boundary_max(v) != 0.0:
            raise ValueError("amplitude fields must vanish on the boundary")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def norm(self) -> float:
        return float(np.sqrt(inner_product(self, self)))

    def normalized(self) -> "ScalarField":
        return ScalarField(self.grid, self.values / self.norm(), self.kind)

    def density(self) -> "ScalarField":
        return ScalarField(self.grid, self.values**2, "density")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values, self.kind)

    def shifted(self, c: float) -> "ScalarField":
        """Add a constant (potentials only)."""
        return ScalarField(self.grid, self.values + c, self.kind)


def _boundary_max(v: np.ndarray) -> float:
    return float(
        max(np.abs(v[0]).max(), np.abs(v[-1]).max(), np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
    )


def _check_same_grid(f: ScalarField, g: ScalarField) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


@lru_cache(maxsize=32)
def node_weights(grid: Grid) -> np.ndarray:
    """Trapezoid cell weights (nm^2): ``h^2`` inside, halved on edges.

    For fields vanishing on the boundary this is exactly ``h^2 * sum``; for
    fields that do not (constants, potentials) it integrates the rectangle
    area exactly.
    """
    wx = np.ones(grid.nx)
    wx[[0, -1]] = 0.5
    wy = np.ones(grid.ny)
    wy[[0, -1]] = 0.5
    w = grid.cell_area * np.outer(wy, wx)
    w.flags.writeable = False
    return w


def inner_product(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 pairing ``h^2 * sum(f * g)`` with ``h`` in nm."""
    _check_same_grid(f, g)
    return float(np.sum(node_weights(f.grid) * f.values * g.values))


def hopping(m_eff: float, step_nm: float) -> float:
    """Kinetic stencil coefficient ``hbar^2 / (2 m h^2)`` in J."""
    h = step_nm * NM
    return hbar**2 / (2.0 * m_eff * h * h)


def laplacian_interior(f: np.ndarray) -> np.ndarray:
    """Five-point stencil sum on interior nodes (unit spacing).

    ``f`` has shape ``(..., ny, nx)`` and is zero outside the interior block it
    represents, i.e. the array holds interior values only.
    """
    out = -4.0 * f
    out[..., 1:, :] += f[..., :-1, :]
    out[..., :-1, :] += f[..., 1:, :]
    out[..., :, 1:] += f[..., :, :-1]
    out[..., :, :-1] += f[..., :, 1:]
    return out


def apply_hamiltonian_interior(v_int: np.ndarray, f: np.ndarray, t: float) -> np.ndarray:
    """``H f`` on interior arrays; ``t`` is :func:`hopping`."""
    return -t * laplacian_interior(f) + v_int * f


def apply_hamiltonian(V: ScalarField, psi: ScalarField, m_eff: float) -> ScalarField:
    """Discrete ``-hbar^2/(2m) Laplacian + V`` with Dirichlet boundary."""
    _check_same_grid(V, psi)
    if _boundary_max(psi.values) != 0.0:
        raise ValueError("psi must vanish on the boundary")
    out = np.zeros(psi.grid.shape)
    t = hopping(m_eff, psi.grid.step)
    out[1:-1, 1:-1] = apply_hamiltonian_interior(
        V.values[1:-1, 1:-1], psi.values[1:-1, 1:-1].copy(), t
    )
    return ScalarField(psi.grid, out, "amplitude")


def energy_expectation(V: ScalarField, psi: ScalarField, m_eff: float) -> float:
    """``<psi|H|psi>`` in J for a normalized amplitude field."""
    norm2 = inner_product(psi, psi)
    if abs(norm2 - 1.0) > 1e-6:
        raise ValueError(f"psi is not normalized (norm^2 = {norm2})")
    return inner_product(psi, apply_hamiltonian(V, psi, m_eff))
