"""Parameter sweeps: solve, characterize, CNOT timings and decay rates per point."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from datetime import datetime, timezone

from . import __version__
from .cnot import CnotTimings, conditional_timings, tune_amplitude
from .config import RunConfig
from .decoherence import rate_breakdown
from .eigensolver import SpectrumResult, lowest_states
from .potentials import CnotGeometry, double_well_potential
from .qubit import QubitCharacterization, characterize, logical_basis

log = logging.getLogger(__name__)

UNITS = {
    "index": "1",
    "w": "1",
    "R_nm": "nm",
    "r_nm": "nm",
    "eps10_J": "J",
    "t_not_s": "s",
    "t_cnot_s": "s",
    "n_real": "1",
    "n": "1",
    "v_b_tuned_J": "J",
    "w_photon": "1/s",
    "w_photon_bound": "1/s",
    "w_da": "1/s",
    "w_pa_t": "1/s",
    "w_pa_l": "1/s",
    "total": "1/s",
    "dominant": "-",
    "solver_iterations": "1",
    "quadrature_nodes": "1",
    "error": "-",
}


@dataclass(frozen=True)
class SweepRow:
    index: int
    w: float
    R_nm: float | None = None
    r_nm: float | None = None
    eps10_J: float | None = None
    t_not_s: float | None = None
    t_cnot_s: float | None = None
    n_real: float | None = None
    n: int | None = None
    v_b_tuned_J: float | None = None
    w_photon: float | None = None
    w_photon_bound: float | None = None
    w_da: float | None = None
    w_pa_t: float | None = None
    w_pa_l: float | None = None
    total: float | None = None
    dominant: str | None = None
    solver_iterations: int | None = None
    quadrature_nodes: int | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


COLUMNS = [f.name for f in fields(SweepRow)]


@dataclass(frozen=True)
class DotResult:
    """Single-dot stage, shared by every row with the same ``w``."""

    w: float
    spectrum: SpectrumResult | None = None
    qubit: QubitCharacterization | None = None
    rates: object = None
    error: str = ""


def sweep_points(cfg: RunConfig) -> list[tuple[float, float | None]]:
    """``(w, R)`` per row, in output order."""
    sw = cfg.sweep
    if sw.parameter == "w":
        R = cfg.cnot.R[0] if cfg.cnot.R else None
        return [(float(w), R) for w in sw.values()]
    ws = sw.w_values or (cfg.well.w,)
    return [(float(w), float(R)) for w in ws for R in sw.values()]


def _describe(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


def solve_dot(cfg: RunConfig, w: float) -> DotResult:
    dw = dataclasses.replace(cfg.well, w=w)
    try:
        spec = lowest_states(
            double_well_potential(dw, cfg.grid),
            dw.m_eff,
            k=4,
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
            guard=cfg.solver.guard,
        )
        qb = characterize(spec)
        rates = rate_breakdown(spec, cfg.materials, qb.r, cfg.quadrature, cfg.literal_longitudinal)
    except Exception as exc:  # recorded per point; the sweep goes on
        log.warning("w=%g failed: %s", w, exc)
        return DotResult(w, error=_describe(exc))
    return DotResult(w, spec, qb, rates)


def cnot_for(cfg: RunConfig, dot: DotResult, R: float) -> CnotTimings:
    dw = dataclasses.replace(cfg.well, w=dot.w)
    zero, one = logical_basis(dot.spectrum.states[0], dot.spectrum.states[1])
    geom = CnotGeometry(R=R, r=dot.qubit.r, kappa=cfg.materials.kappa)
    densities = (zero.density(), one.density())
    kw = dict(tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)
    if cfg.cnot.tune:
        window = (cfg.cnot.v_b_low * dw.V_B, cfg.cnot.v_b_high * dw.V_B)
        return tune_amplitude(dw, geom, densities, window, **kw)
    return conditional_timings(dw, geom, densities, **kw)


def _row(cfg: RunConfig, index: int, dot: DotResult, R: float | None) -> SweepRow:
    row = SweepRow(index=index, w=dot.w, R_nm=R)
    if dot.error:
        return dataclasses.replace(row, error=dot.error)
    qb, rb = dot.qubit, dot.rates
    row = dataclasses.replace(
        row,
        r_nm=qb.r,
        eps10_J=qb.eps10,
        t_not_s=qb.t_not,
        w_photon=rb.w_photon,
        w_photon_bound=rb.w_photon_bound,
        w_da=rb.w_da,
        w_pa_t=rb.w_pa_t,
        w_pa_l=rb.w_pa_l,
        total=rb.total,
        dominant=rb.dominant,
        solver_iterations=dot.spectrum.iterations,
        quadrature_nodes=cfg.quadrature.n_theta * cfg.quadrature.n_phi,
    )
    if R is None:
        return row
    try:
        tm = cnot_for(cfg, dot, R)
    except Exception as exc:
        log.warning("w=%g R=%g CNOT failed: %s", dot.w, R, exc)
        return dataclasses.replace(row, error=_describe(exc))
    return dataclasses.replace(
        row, t_cnot_s=tm.t_cnot, n_real=tm.n_real, n=tm.n, v_b_tuned_J=tm.v_b_tuned
    )


def run_sweep(cfg: RunConfig, threads: int | None = None) -> list[SweepRow]:
    """All sweep rows, ordered by index whatever the completion order."""
    threads = threads or cfg.sweep.threads
    points = sweep_points(cfg)
    ws = list(dict.fromkeys(w for w, _ in points))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        dots = dict(zip(ws, pool.map(lambda w: solve_dot(cfg, w), ws)))
        rows = list(pool.map(lambda ip: _row(cfg, ip[0], dots[ip[1][0]], ip[1][1]), enumerate(points)))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def csv_text(rows: list[SweepRow], cfg: RunConfig, timestamp: bool = True) -> str:
    """CSV with a ``#`` metadata block; the timestamp line is the only
    non-deterministic content."""
    buf = io.StringIO()
    buf.write("# chargequbit sweep\n")
    buf.write(f"# version: {__version__}\n")
    buf.write(f"# config_sha256: {cfg.digest()}\n")
    buf.write(f"# sweep: {cfg.sweep.parameter} from {cfg.sweep.start!r} to {cfg.sweep.stop!r}, {cfg.sweep.count} points\n")
    buf.write("# orientation: control |1> nearer the target (R - r/2)\n")
    buf.write(f"# longitudinal weight: {'literal (no cos theta)' if cfg.literal_longitudinal else 'cos^5 theta'}\n")
    buf.write("# units: " + ", ".join(f"{k}={v}" for k, v in UNITS.items()) + "\n")
    if timestamp:
        now = datetime.now(timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# timestamp (non-deterministic): {now}\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def write_csv(rows: list[SweepRow], cfg: RunConfig, path: str, timestamp: bool = True) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(rows, cfg, timestamp))
    return path


_TYPES = {f.name: f.type for f in fields(SweepRow)}


def _parse_cell(name: str, text: str):
    if name == "error":
        return text
    if text == "":
        return None
    kind = _TYPES[name]
    if "int" in kind and "float" not in kind:
        return int(text)
    if "str" in kind:
        return text
    return float(text)


def read_csv(path_or_text: str) -> list[SweepRow]:
    """Rows from a sweep CSV (path or the text itself)."""
    if "\n" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8", newline="") as fh:
            text = fh.read()
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(body)
    if reader.fieldnames != COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    return [SweepRow(**{k: _parse_cell(k, v) for k, v in rec.items()}) for rec in reader]
