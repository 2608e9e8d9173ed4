"""Conditional NOT durations, the CNOT pulse and integer-N tuning.

The control dot is a frozen charge density. Its Coulomb field shifts the
target's barrier, so the target's NOT time depends on the control state. A
single pulse of length ``t_cnot`` then performs an even number of NOTs for one
control state (identity) and an odd number for the other (NOT). The ratio is
made an exact integer by adjusting the pulsed barrier height.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from .eigensolver import SpectrumResult, lowest_states
from .fields import ScalarField
from .potentials import (
    CnotGeometry,
    DoubleWellParams,
    coulomb_field_from_density,
    double_well_potential,
)
from .qubit import LogicalState, check_doublet, evolve, not_duration

log = logging.getLogger(__name__)

INTEGER_TOL = 1e-6


class TuningError(RuntimeError):
    pass


@dataclass(frozen=True)
class CnotTimings:
    """Durations in s.

    ``t_not0``/``t_not1`` are the target NOT times with control in |0>/|1>.
    When ``t_not0 > t_not1`` the roles are relabelled (``swapped``): control
    |1> then selects the identity and |0> the NOT.
    """

    t_not0: float
    t_not1: float
    t_cnot: float
    n_real: float
    n: int
    v_b_tuned: float
    swapped: bool = False
    evaluations: int = 0

    @property
    def t_even(self) -> float:
        """NOT time of the branch that performs ``2n`` NOTs (identity)."""
        return self.t_not1 if self.swapped else self.t_not0

    @property
    def t_odd(self) -> float:
        return self.t_not0 if self.swapped else self.t_not1


def cnot_schedule(t_not0: float, t_not1: float) -> tuple[float, float, bool]:
    """Pulse length and NOT-count ratio.

    Returns ``(t_cnot, n_real, swapped)`` with
    ``t_cnot = t_a t_b / (t_b - t_a)`` and ``n_real = t_b / (2 (t_b - t_a))``
    for ``t_a < t_b``; ``swapped`` is set when ``t_not0 > t_not1``.
    """
    if not (t_not0 > 0 and t_not1 > 0):
        raise ValueError("durations must be positive")
    if t_not0 == t_not1:
        raise ValueError("equal NOT durations: no conditional contrast")
    swapped = t_not0 > t_not1
    ta, tb = (t_not1, t_not0) if swapped else (t_not0, t_not1)
    diff = tb - ta
    return ta * tb / diff, tb / (2.0 * diff), swapped


def _solve(V: ScalarField, dw: DoubleWellParams, start, tol, max_iter) -> SpectrumResult:
    return lowest_states(V, dw.m_eff, k=4, tol=tol, max_iter=max_iter, start=start)


def conditional_not_duration(
    dw: DoubleWellParams,
    geom: CnotGeometry,
    control_state: int,
    control_density: ScalarField,
    tol: float = 1e-9,
    max_iter: int = 200_000,
) -> float:
    """Target NOT time (s) in the field of the control electron.

    The target uses the control density's grid; ``control_state`` only labels
    which density was passed and is checked to be 0 or 1.
    """
    if control_state not in (0, 1):
        raise ValueError("control_state must be 0 or 1")
    grid = control_density.grid
    Vc = coulomb_field_from_density(control_density, geom, grid)
    spec = _solve(double_well_potential(dw, grid) + Vc, dw, None, tol, max_iter)
    return not_duration(check_doublet(spec))


class _ConditionalPair:
    """Evaluates both conditional NOT times at a given barrier height.

    Coulomb fields are computed once; each solve warm-starts from the previous
    one for the same control state.
    """

    def __init__(self, dw, geom, densities, tol, max_iter):
        self.dw = dw
        grid = densities[0].grid
        self.grid = grid
        self.fields = [coulomb_field_from_density(d, geom, grid) for d in densities]
        self.tol = tol
        self.max_iter = max_iter
        self.last: list[SpectrumResult | None] = [None, None]
        self.count = 0
        self.cache: dict[float, tuple[float, float]] = {}

    def durations(self, v_b: float) -> tuple[float, float]:
        if v_b in self.cache:
            return self.cache[v_b]
        params = dataclasses.replace(self.dw, V_B=v_b)
        base = double_well_potential(params, self.grid)
        out = []
        for s in (0, 1):
            spec = _solve(base + self.fields[s], params, self.last[s], self.tol, self.max_iter)
            self.last[s] = spec
            out.append(not_duration(check_doublet(spec)))
        self.count += 1
        self.cache[v_b] = (out[0], out[1])
        log.info("V_B=%.9e J: t_not0=%.9e s t_not1=%.9e s", v_b, out[0], out[1])
        return self.cache[v_b]

    def n_real(self, v_b: float) -> float:
        return cnot_schedule(*self.durations(v_b))[1]


def _timings(pair: _ConditionalPair, v_b: float, n: int) -> CnotTimings:
    t0, t1 = pair.durations(v_b)
    t_cnot, n_real, swapped = cnot_schedule(t0, t1)
    return CnotTimings(t0, t1, t_cnot, n_real, n, v_b, swapped, pair.count)


def conditional_timings(
    dw: DoubleWellParams,
    geom: CnotGeometry,
    control_densities: tuple[ScalarField, ScalarField],
    tol: float = 1e-9,
    max_iter: int = 200_000,
) -> CnotTimings:
    """Untuned timings at the static barrier; ``n`` is the nearest integer."""
    pair = _ConditionalPair(dw, geom, control_densities, tol, max_iter)
    n_real = pair.n_real(dw.V_B)
    return _timings(pair, dw.V_B, int(round(n_real)))


def find_integer_root(func, a: float, b: float, max_iter: int = 200):
    """Bracketed root search for ``n_real(V_B)`` hitting an integer.

    Returns ``(v_b, n)``. The target integer is the one nearest the interval's
    midpoint value that the bracket actually spans. Steps are bisection with
    Illinois false-position updates, which keeps the bracket and converges
    superlinearly on smooth ``n_real``.
    """
    fa, fb = func(a), func(b)
    for x, fx in ((a, fa), (b, fb)):
        if abs(fx - round(fx)) < INTEGER_TOL:
            return x, int(round(fx))
    mid = 0.5 * (a + b)
    fm = func(mid)
    n = int(round(fm))
    lo_n, hi_n = sorted((fa, fb))
    if not lo_n <= n <= hi_n:
        candidates = [k for k in range(int(np.ceil(lo_n)), int(np.floor(hi_n)) + 1)]
        if not candidates:
            raise TuningError(
                f"no integer between endpoint n_real values {fa:.9g} and {fb:.9g}; widen the V_B interval"
            )
        n = min(candidates, key=lambda k: abs(k - fm))
    ga, gb, gm = fa - n, fb - n, fm - n
    if abs(gm) < INTEGER_TOL:
        return mid, n
    # Shrink to the half containing the root.
    if ga * gm < 0:
        b, gb = mid, gm
    else:
        a, ga = mid, gm
    side = 0
    for _ in range(max_iter):
        if ga * gb > 0:
            raise TuningError(f"root bracket lost: f(a)={ga + n:.9g}, f(b)={gb + n:.9g}")
        x = b - gb * (b - a) / (gb - ga)
        if not a < x < b:
            x = 0.5 * (a + b)
        gx = func(x) - n
        if abs(gx) < INTEGER_TOL:
            return x, n
        if gx * gb < 0:
            a, ga = b, gb
            b, gb = x, gx
            side = 0
        else:
            b, gb = x, gx
            if side == 1:
                ga *= 0.5
            side = 1
        if abs(b - a) <= 4 * np.finfo(float).eps * max(abs(a), abs(b)):
            break
    raise TuningError(f"tuning did not reach |n_real - {n}| < {INTEGER_TOL}")


def tune_amplitude(
    dw: DoubleWellParams,
    geom: CnotGeometry,
    control_densities: tuple[ScalarField, ScalarField],
    v_b_interval: tuple[float, float],
    tol: float = 1e-9,
    max_iter: int = 200_000,
) -> CnotTimings:
    """Adjust the pulsed barrier height so ``n_real`` is an integer."""
    a, b = sorted(v_b_interval)
    if not a > 0:
        raise ValueError("barrier heights must be positive")
    pair = _ConditionalPair(dw, geom, control_densities, tol, max_iter)
    v_b, n = find_integer_root(pair.n_real, a, b)
    return _timings(pair, v_b, n)


def branch_fidelities(t_cnot: float, t_even: float, t_odd: float) -> tuple[float, float]:
    """Identity fidelity of the even branch and NOT fidelity of the odd branch.

    Each is the worst squared overlap over the two basis inputs, using the
    closed-form two-level evolution (global phase drops out).
    """
    basis = (LogicalState(1.0, 0.0), LogicalState(0.0, 1.0))
    ident = 1.0
    flip = 1.0
    for inp in basis:
        out = evolve(inp, 0.0, np.pi / t_even, t_cnot)
        ident = min(ident, abs(np.vdot([inp.c0, inp.c1], [out.c0, out.c1])) ** 2)
        out = evolve(inp, 0.0, np.pi / t_odd, t_cnot)
        flipped = (inp.c1, inp.c0)
        flip = min(flip, abs(np.vdot(flipped, [out.c0, out.c1])) ** 2)
    return float(ident), float(flip)


def verify_cnot(timings: CnotTimings) -> tuple[float, float]:
    """``(identity fidelity, NOT fidelity)`` for the two control branches."""
    return branch_fidelities(timings.t_cnot, timings.t_even, timings.t_odd)
