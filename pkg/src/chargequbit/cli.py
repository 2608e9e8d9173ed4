"""Command line: ``python3 -m chargequbit <command> [--config FILE] ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from scipy.constants import e

from .config import ConfigError, RunConfig, parse_config
from .cnot import verify_cnot
from .figures import emit_figures
from .sweep import cnot_for, read_csv, run_sweep, solve_dot, write_csv


def load_config(args) -> RunConfig:
    text = ""
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    cfg = parse_config(text)
    overrides = {}
    if args.literal_longitudinal:
        overrides["output__literal_longitudinal"] = True
    if args.out:
        overrides["output__dir"] = args.out
    if args.threads:
        overrides["sweep__threads"] = args.threads
    return cfg.with_overrides(**overrides) if overrides else cfg


def _dot_or_fail(cfg: RunConfig):
    dot = solve_dot(cfg, cfg.well.w)
    if dot.error:
        print(f"error: {dot.error}", file=sys.stderr)
    return dot


def cmd_solve(cfg: RunConfig) -> int:
    dot = _dot_or_fail(cfg)
    if dot.error:
        return 1
    sp = dot.spectrum
    print(f"w = {cfg.well.w}  iterations = {sp.iterations}")
    for i, (E, res) in enumerate(zip(sp.energies, sp.residuals)):
        print(f"E{i} = {E:.12e} J  ({E / e * 1e3:.6f} meV)  residual {res:.2e}")
    return 0


def cmd_characterize(cfg: RunConfig) -> int:
    dot = _dot_or_fail(cfg)
    if dot.error:
        return 1
    q = dot.qubit
    print(f"eps10        {q.eps10:.9e} J ({q.eps10 / e * 1e6:.6g} ueV)")
    print(f"delta_omega  {q.delta_omega:.9e} 1/s")
    print(f"t_NOT        {q.t_not:.9e} s")
    print(f"r            {q.r:.6f} nm")
    print(f"P(|0>, x>0)  {q.loc0:.9f}")
    print(f"P(|1>, x<0)  {q.loc1:.9f}")
    return 0


def cmd_cnot(cfg: RunConfig) -> int:
    if not cfg.cnot.R:
        print("error: set cnot.R in the config", file=sys.stderr)
        return 2
    dot = _dot_or_fail(cfg)
    if dot.error:
        return 1
    status = 0
    for R in cfg.cnot.R:
        try:
            tm = cnot_for(cfg, dot, R)
        except Exception as exc:
            print(f"R = {R} nm: error: {exc}", file=sys.stderr)
            status = 1
            continue
        ident, flip = verify_cnot(tm)
        print(f"R = {R} nm  r = {dot.qubit.r:.4f} nm  swapped = {tm.swapped}")
        print(f"  t_not0 = {tm.t_not0:.9e} s  t_not1 = {tm.t_not1:.9e} s")
        print(f"  t_cnot = {tm.t_cnot:.9e} s  n_real = {tm.n_real:.9f}  n = {tm.n}")
        print(f"  V_B    = {tm.v_b_tuned:.9e} J  evaluations = {tm.evaluations}")
        print(f"  fidelity identity = {ident:.12f}  NOT = {flip:.12f}")
    return status


def cmd_rates(cfg: RunConfig) -> int:
    dot = _dot_or_fail(cfg)
    if dot.error:
        return 1
    rb = dot.rates
    for name in ("w_photon", "w_photon_bound", "w_da", "w_pa_t", "w_pa_l", "total"):
        print(f"{name:15s} {getattr(rb, name):.9e} 1/s")
    print(f"{'dominant':15s} {rb.dominant}")
    return 0


def cmd_sweep(cfg: RunConfig, timestamp: bool) -> int:
    rows = run_sweep(cfg)
    path = write_csv(rows, cfg, os.path.join(cfg.out_dir, "sweep.csv"), timestamp)
    print(f"wrote {path}")
    if cfg.emit_svg:
        written, notices = emit_figures(rows, cfg.out_dir)
        for p in written:
            print(f"wrote {p}")
        for msg in notices:
            print(f"notice: {msg}")
    failed = [r for r in rows if not r.ok]
    for r in failed:
        print(f"point {r.index} failed: {r.error}", file=sys.stderr)
    bad = [r for r in rows if r.ok and r.w_photon > r.w_photon_bound]
    for r in bad:
        print(f"point {r.index}: photon rate exceeds its bound", file=sys.stderr)
    return 1 if failed or bad else 0


def cmd_figures(cfg: RunConfig, csv_path: str) -> int:
    rows = read_csv(csv_path)
    written, notices = emit_figures(rows, cfg.out_dir)
    for p in written:
        print(f"wrote {p}")
    for msg in notices:
        print(f"notice: {msg}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--literal-longitudinal", "--paper-literal-eq57", dest="literal_longitudinal",
                        action="store_true",
                        help="longitudinal piezo weight without the cos(theta) Jacobian")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp line from CSV output")
    common.add_argument("--threads", type=int, help="concurrent sweep points")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chargequbit", description="Double-dot charge qubit design curves.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="lowest four energies")
    sub.add_parser("characterize", parents=[common], help="splitting, NOT time, r, localization")
    sub.add_parser("cnot", parents=[common], help="CNOT timings for each cnot.R")
    sub.add_parser("rates", parents=[common], help="decay rates per channel")
    sub.add_parser("sweep", parents=[common], help="full pipeline over the sweep; CSV and SVG")
    fig = sub.add_parser("figures", parents=[common], help="re-plot from a sweep CSV")
    fig.add_argument("csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "solve":
        return cmd_solve(cfg)
    if args.command == "characterize":
        return cmd_characterize(cfg)
    if args.command == "cnot":
        return cmd_cnot(cfg)
    if args.command == "rates":
        return cmd_rates(cfg)
    if args.command == "sweep":
        return cmd_sweep(cfg, timestamp=not args.no_timestamp)
    return cmd_figures(cfg, args.csv)
