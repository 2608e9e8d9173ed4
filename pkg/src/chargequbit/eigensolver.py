"""Lowest eigenpairs of the discrete Hamiltonian.

:func:`lowest_states` is a shifted power (subspace) iteration: each step
applies ``sigma*I - H`` with ``sigma`` the Gershgorin upper bound, so the
lowest states of ``H`` become the dominant ones, then Gram-Schmidt
re-orthonormalizes the block. A Rayleigh-Ritz rotation inside the block
separates near-degenerate pairs such as the tunnel-split doublet.

:func:`dense_oracle` is an independent check for coarse grids: the full
matrix is reduced to tridiagonal form by Householder reflections, the lowest
eigenvalues are bracketed by Sturm-sequence bisection and the vectors come
from inverse iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .fields import (
    Grid,
    ScalarField,
    apply_hamiltonian_interior,
    hopping,
    inner_product,
)

log = logging.getLogger(__name__)

MAX_STATES = 8
ORACLE_MAX_NODES = 2500


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residuals: np.ndarray, iterations: int):
        super().__init__(message)
        self.residuals = residuals
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Lowest energies (J, ascending) with their normalized states.

    ``residuals[i]`` is ``||H psi_i - E_i psi_i||`` in J. ``subspace`` holds the
    converged iteration block (interior, unit-norm columns) for warm starts.
    """

    energies: np.ndarray
    states: tuple[ScalarField, ...]
    residuals: np.ndarray
    iterations: int
    potential: ScalarField
    m_eff: float
    subspace: np.ndarray | None = field(default=None, repr=False)
    splitting: float | None = None

    @property
    def eps10(self) -> float:
        """``E1 - E0``; taken from the extended-precision splitting when set."""
        if self.splitting is not None:
            return self.splitting
        return float(self.energies[1] - self.energies[0])

    @property
    def grid(self) -> Grid:
        return self.potential.grid


def gershgorin_upper(v_int: np.ndarray, t: float) -> float:
    """Row-sum bound on the largest eigenvalue: ``max(V) + 8 t``."""
    return float(v_int.max() + 8.0 * t)


def _seed_block(grid: Grid, k: int, p: int) -> np.ndarray:
    """Deterministic start vectors on the interior, shape ``(p, ny-2, nx-2)``.

    The first ``k`` are Gaussians times ``x^a y^b`` with x-parity ``(-1)^j``;
    the remaining guard vectors are off-centre and carry no definite parity,
    so no symmetry sector is missing from the block.
    """
    X, Y = grid.mesh()
    X = X[1:-1, 1:-1]
    Y = Y[1:-1, 1:-1]
    s = min(grid.half_width_x, grid.half_width_y) / 3.0
    env = np.exp(-(X * X + Y * Y) / (2 * s * s))
    xs, ys = X / s, Y / s
    powers = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (3, 0), (0, 2), (1, 2)]
    block = np.empty((p,) + X.shape)
    for j in range(p):
        if j < k:
            a, b = powers[j]
            block[j] = env * xs**a * ys**b
        else:
            g = j - k
            cx = 0.4 * s * np.cos(1.0 + 2.1 * g)
            cy = 0.4 * s * np.sin(1.0 + 2.1 * g)
            shifted = np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * s * s))
            block[j] = shifted * (1.0 + xs) ** (g % 3 + 1) * (1.0 + 0.5 * ys)
    return block


def gram_schmidt(block: np.ndarray) -> np.ndarray:
    """Orthonormalize rows of a ``(p, n)`` array in place (two passes of CGS)."""
    for j in range(block.shape[0]):
        v = block[j]
        for _ in range(2):
            if j:
                prev = block[:j]
                v -= prev.T @ (prev @ v)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ConvergenceError("iteration block lost rank", np.full(1, np.inf), 0)
        v /= nrm
    return block


def _reference_node(potential: ScalarField) -> tuple[int, int]:
    """Node nearest the right-hand potential minimum on the ``y = 0`` row."""
    grid = potential.grid
    row, col0 = grid.origin_index
    right = potential.values[row, col0 + 1 : -1]
    return (row, col0 + 1 + int(np.argmin(right)))


def fix_sign(values: np.ndarray, ref: tuple[int, int]) -> np.ndarray:
    """Flip so the value at ``ref`` is positive.

    States with a node at ``ref`` fall back to the first near-maximal node in
    row-major order.
    """
    amax = np.abs(values).max()
    if abs(values[ref]) > 1e-6 * amax:
        return values if values[ref] > 0 else -values
    flat = values.ravel()
    idx = int(np.flatnonzero(np.abs(flat) >= (1 - 1e-6) * amax)[0])
    return values if flat[idx] > 0 else -values


def _pack_states(
    potential: ScalarField, vectors: np.ndarray, k: int
) -> tuple[ScalarField, ...]:
    """Interior unit vectors -> normalized, sign-fixed amplitude fields."""
    grid = potential.grid
    ref = _reference_node(potential)
    states = []
    for j in range(k):
        full = np.zeros(grid.shape)
        full[1:-1, 1:-1] = vectors[j].reshape(grid.ny - 2, grid.nx - 2) / grid.step
        full = fix_sign(full, ref)
        psi = ScalarField(grid, full, "amplitude")
        states.append(psi.normalized())
    return tuple(states)


def _check_k(grid: Grid, k: int) -> int:
    n = (grid.nx - 2) * (grid.ny - 2)
    if k < 1 or k > MAX_STATES:
        raise ValueError(f"k must be in 1..{MAX_STATES}, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} interior nodes")
    return n


def lowest_states(
    V: ScalarField,
    m_eff: float,
    k: int = 4,
    tol: float = 1e-8,
    max_iter: int = 200_000,
    guard: int = 4,
    start: SpectrumResult | None = None,
) -> SpectrumResult:
    """The ``k`` lowest eigenpairs by shifted subspace iteration.

    Parameters
    ----------
    V : ScalarField
        Potential energy (J).
    m_eff : float
        Effective mass (kg).
    k : int
        Number of states wanted (at most 8).
    tol : float
        Converged when ``||H psi - E psi|| < tol * |E|`` for every state.
    max_iter : int
        Iteration cap; :class:`ConvergenceError` carries the last residuals.
    guard : int
        Extra block vectors; they speed up convergence of the k-th state.
    start : SpectrumResult, optional
        Warm start from a solve on the same grid.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = V.grid
    n = _check_k(grid, k)
    p = min(k + guard, n)
    t = hopping(m_eff, grid.step)
    v_int = np.ascontiguousarray(V.values[1:-1, 1:-1])
    sigma = gershgorin_upper(v_int, t)
    shape = v_int.shape

    if start is not None and start.subspace is not None and start.grid == grid:
        Q = start.subspace.copy()
        if Q.shape[0] < p:
            Q = np.concatenate([Q, _seed_block(grid, k, p)[Q.shape[0] : p].reshape(p - Q.shape[0], -1)])
        Q = Q[:p]
    else:
        Q = _seed_block(grid, k, p).reshape(p, -1)
    Q = gram_schmidt(Q)

    residuals = np.full(k, np.inf)
    for it in range(1, max_iter + 1):
        HQ = apply_hamiltonian_interior(v_int, Q.reshape((p,) + shape), t).reshape(p, -1)
        # Rayleigh-Ritz inside the block.
        G = Q @ HQ.T
        theta, Y = np.linalg.eigh(0.5 * (G + G.T))
        Q = Y.T @ Q
        HQ = Y.T @ HQ
        R = HQ[:k] - theta[:k, None] * Q[:k]
        residuals = np.linalg.norm(R, axis=1) / np.abs(theta[:k])
        if np.all(residuals < tol):
            break
        Q = gram_schmidt(sigma * Q - HQ)
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations; relative residuals {residuals}",
            residuals,
            max_iter,
        )
    log.info("lowest_states: %d iterations, residuals %s", it, residuals)

    states = _pack_states(V, Q, k)
    energies_ld = np.array([rayleigh_quotient_extended(v_int, s.values[1:-1, 1:-1], t) for s in states])
    order = np.argsort(energies_ld, kind="stable")
    states = tuple(states[i] for i in order)
    energies_ld = energies_ld[order]
    energies = energies_ld.astype(float)
    abs_res = residuals[order] * np.abs(energies)
    _assert_orthonormal(states)
    splitting = float(energies_ld[1] - energies_ld[0]) if k >= 2 else None
    return SpectrumResult(energies, states, abs_res, it, V, m_eff, subspace=Q.copy(), splitting=splitting)


def rayleigh_quotient_extended(v_int: np.ndarray, f: np.ndarray, t: float) -> np.longdouble:
    """``<f|H|f> / <f|f>`` accumulated in ``np.longdouble``.

    The tunnel splitting is a difference of two nearly equal energies; near
    convergence the quotient error is second order in the residual, so the
    float64 rounding of the sums is what limits it. Extended precision removes
    that floor on platforms where longdouble is wider than double.
    """
    ld = np.longdouble
    f = f.astype(ld)
    hf = apply_hamiltonian_interior(v_int.astype(ld), f, ld(t))
    return np.sum(f * hf) / np.sum(f * f)


def _assert_orthonormal(states, tol: float = 1e-8) -> None:
    for i, a in enumerate(states):
        for j, b in enumerate(states[: i + 1]):
            target = 1.0 if i == j else 0.0
            if abs(inner_product(a, b) - target) > tol:
                raise ConvergenceError(
                    f"states {i},{j} not orthonormal", np.full(len(states), np.nan), 0
                )


# ---------------------------------------------------------------------------
# Dense oracle


def hamiltonian_matrix(V: ScalarField, m_eff: float) -> np.ndarray:
    """Dense interior Hamiltonian (J), nodes ordered row-major by y then x."""
    grid = V.grid
    ny, nx = grid.ny - 2, grid.nx - 2
    n = nx * ny
    t = hopping(m_eff, grid.step)
    H = np.diag(V.values[1:-1, 1:-1].ravel() + 4.0 * t)
    idx = np.arange(n).reshape(ny, nx)
    for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        H[a.ravel(), b.ravel()] = -t
        H[b.ravel(), a.ravel()] = -t
    return H


def householder_tridiagonal(A: np.ndarray):
    """Reduce symmetric ``A`` to tridiagonal ``(d, e)``.

    Returns the diagonal, the sub-diagonal and the list of reflector vectors
    ``v_k`` (acting on indices ``k+1:``) with ``A = Q T Q^T``,
    ``Q = H_0 H_1 ... H_{n-3}``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    reflectors = []
    for k in range(n - 2):
        x = A[k + 1 :, k]
        alpha = -np.copysign(np.linalg.norm(x), x[0])
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0 or alpha == 0.0:
            reflectors.append(None)
            continue
        v /= vn
        sub = A[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2 :, k] = 0.0
        A[k, k + 2 :] = 0.0
        reflectors.append(v)
    d = np.diag(A).copy()
    e = np.diag(A, -1).copy()
    return d, e, reflectors


def sturm_count(d: np.ndarray, e: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Number of eigenvalues of the tridiagonal ``(d, e)`` below each ``lam``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    tiny = np.finfo(float).tiny * 1e10
    scale = max(np.abs(d).max(), np.abs(e).max() if e.size else 0.0, 1e-300)
    count = np.zeros(lam.shape, dtype=int)
    q = d[0] - lam
    count += q < 0
    e2 = e * e
    for i in range(1, d.size):
        q = np.where(np.abs(q) < tiny * scale, -tiny * scale, q)
        q = d[i] - lam - e2[i - 1] / q
        count += q < 0
    return count


def tridiagonal_lowest_eigenvalues(d: np.ndarray, e: np.ndarray, k: int) -> np.ndarray:
    """The ``k`` smallest eigenvalues by bisection on Sturm counts."""
    off = np.zeros(d.size)
    off[:-1] += np.abs(e)
    off[1:] += np.abs(e)
    lo = np.full(k, (d - off).min())
    hi = np.full(k, (d + off).max())
    target = np.arange(k)
    eps = np.finfo(float).eps
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if np.all((mid <= lo) | (mid >= hi) | (hi - lo <= 2 * eps * np.maximum(np.abs(lo), np.abs(hi)))):
            break
        below = sturm_count(d, e, mid) > target
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


def tridiagonal_eigenvectors(d: np.ndarray, e: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Inverse iteration for each eigenvalue, re-orthogonalizing clusters."""
    n = d.size
    norm = np.abs(d).max() + 2 * (np.abs(e).max() if e.size else 0.0)
    cluster_gap = 1e-3 * norm
    vecs = np.zeros((lams.size, n))
    rng = np.random.default_rng(12345)
    for j, lam in enumerate(lams):
        shift = lam - 2 * np.finfo(float).eps * norm
        ab = np.zeros((3, n))
        ab[0, 1:] = e
        ab[1] = d - shift
        ab[2, :-1] = e
        x = rng.standard_normal(n)
        cluster = [i for i in range(j) if abs(lams[i] - lam) < cluster_gap]
        for _ in range(4):
            x = solve_banded((1, 1), ab, x)
            for i in cluster:
                x -= (vecs[i] @ x) * vecs[i]
            x /= np.linalg.norm(x)
        vecs[j] = x
    return vecs


def _back_transform(vecs: np.ndarray, reflectors) -> np.ndarray:
    out = vecs.copy()
    for k in range(len(reflectors) - 1, -1, -1):
        v = reflectors[k]
        if v is None:
            continue
        seg = out[:, k + 1 :]
        seg -= 2.0 * np.outer(seg @ v, v)
    return out


def dense_eigh_lowest(A: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """``k`` lowest eigenpairs of symmetric ``A``; vectors as rows."""
    scale = np.abs(A).max()
    d, e, refl = householder_tridiagonal(A / scale)
    lams = tridiagonal_lowest_eigenvalues(d, e, k)
    vt = tridiagonal_eigenvectors(d, e, lams)
    vecs = _back_transform(vt, refl)
    # One Rayleigh-Ritz pass on the full matrix tidies up cluster bases.
    G = vecs @ (A / scale) @ vecs.T
    theta, Y = np.linalg.eigh(0.5 * (G + G.T))
    vecs = Y.T @ vecs
    return theta * scale, vecs


def dense_oracle(V: ScalarField, m_eff: float, k: int = 4) -> SpectrumResult:
    """Full dense diagonalization of the interior Hamiltonian (coarse grids)."""
    grid = V.grid
    n = _check_k(grid, k)
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"grid has {n} interior nodes; the dense oracle allows {ORACLE_MAX_NODES}")
    H = hamiltonian_matrix(V, m_eff)
    lams, vecs = dense_eigh_lowest(H, k)
    states = _pack_states(V, vecs, k)
    res = np.array(
        [np.linalg.norm(H @ (s.values[1:-1, 1:-1].ravel() * grid.step) - lam * s.values[1:-1, 1:-1].ravel() * grid.step) for s, lam in zip(states, lams)]
    )
    return SpectrumResult(lams, states, res, 0, V, m_eff, subspace=None)
