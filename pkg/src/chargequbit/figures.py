"""Design-curve SVGs from sweep rows. Output is byte-stable for equal rows."""

from __future__ import annotations

import logging
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweep import SweepRow  # noqa: E402

log = logging.getLogger(__name__)

_RC = {"svg.hashsalt": "chargequbit", "svg.fonttype": "path", "figure.figsize": (5.0, 3.6)}


def _save(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _per_dot(rows: list[SweepRow]) -> list[SweepRow]:
    """One row per ``w`` (R-sweeps repeat the single-dot columns), sorted by r."""
    seen = {}
    for row in rows:
        if row.r_nm is not None and row.w not in seen:
            seen[row.w] = row
    return sorted(seen.values(), key=lambda r: r.r_nm)


def _line(path, xs, ys, xlabel, ylabel, logy=False):
    fig, ax = plt.subplots()
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    fig.tight_layout()
    _save(fig, path)


def emit_figures(rows: list[SweepRow], out_dir: str) -> tuple[list[str], list[str]]:
    """Write the four plots; return ``(written paths, notices)``.

    A plot whose data has fewer than two points is skipped with a notice.
    """
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    notices: list[str] = []
    dots = _per_dot(rows)
    with plt.rc_context(_RC):
        if len(dots) < 2:
            notices.append("t_not, rates and eps10 plots skipped: fewer than two successful sweep points")
        else:
            r = [d.r_nm for d in dots]
            p = os.path.join(out_dir, "t_not_vs_r.svg")
            _line(p, r, [d.t_not_s for d in dots], "r (nm)", "t_NOT (s)", logy=True)
            written.append(p)

            fig, ax = plt.subplots()
            series = [
                ("photon", "w_photon"),
                ("deformation", "w_da"),
                ("piezo transverse", "w_pa_t"),
                ("piezo longitudinal", "w_pa_l"),
                ("total", "total"),
            ]
            for label, col in series:
                ax.plot(r, [getattr(d, col) for d in dots], "o-", label=label)
            ax.set_yscale("log")
            ax.set_xlabel("r (nm)")
            ax.set_ylabel("rate (1/s)")
            ax.legend(fontsize="small")
            fig.tight_layout()
            p = os.path.join(out_dir, "rates_vs_r.svg")
            _save(fig, p)
            written.append(p)

            p = os.path.join(out_dir, "eps10_vs_r.svg")
            _line(p, r, [d.eps10_J for d in dots], "r (nm)", "eps10 (J)", logy=True)
            written.append(p)

        curves = defaultdict(list)
        for row in rows:
            if row.t_cnot_s is not None and row.R_nm is not None:
                curves[(row.w, row.r_nm)].append((row.R_nm, row.t_cnot_s))
        curves = {k: sorted(v) for k, v in curves.items() if len(v) >= 2}
        if not curves:
            notices.append("t_cnot plot skipped: needs an R sweep with at least two CNOT points")
        else:
            fig, ax = plt.subplots()
            for (w, r), pts in sorted(curves.items()):
                ax.plot([a for a, _ in pts], [b for _, b in pts], "o-", label=f"r = {r:.1f} nm")
            ax.set_yscale("log")
            ax.set_xlabel("R (nm)")
            ax.set_ylabel("t_CNOT (s)")
            ax.legend(fontsize="small")
            fig.tight_layout()
            p = os.path.join(out_dir, "t_cnot_vs_R.svg")
            _save(fig, p)
            written.append(p)
    for msg in notices:
        log.info(msg)
    return written, notices
