"""Design curves over the studied barrier-width range.

Runs the w sweep on the full grid and writes ``sweep.csv`` plus the SVG
plots. With ``--with-cnot`` a second, R sweep produces the tuned CNOT pulse
lengths (about a minute per point on one core).

    python3 scripts/reproduce_figures.py --out results/design --count 10
"""

import argparse
import os
import sys

from chargequbit.cli import main

R_SWEEP = """\
sweep.parameter = R
sweep.start = 40
sweep.stop = 60
sweep.count = 3
sweep.w_values = 0.26, 0.34
"""


def _run(out: str, text: str, threads: int) -> int:
    os.makedirs(out, exist_ok=True)
    cfg = os.path.join(out, "run.cfg")
    with open(cfg, "w", encoding="utf-8") as fh:
        fh.write(text)
    return main(["sweep", "--config", cfg, "--out", out, "--threads", str(threads)])


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/design")
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--with-cnot", action="store_true")
    args = ap.parse_args(argv)
    status = _run(args.out, f"sweep.count = {args.count}\n", args.threads)
    if args.with_cnot:
        status |= _run(os.path.join(args.out, "cnot"), R_SWEEP, args.threads)
    return status


if __name__ == "__main__":
    sys.exit(run())
