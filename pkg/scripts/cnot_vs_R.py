"""Tuned CNOT pulse length against control-target separation.

    python3 scripts/cnot_vs_R.py --w 0.34 --R 40 50 60
"""

import argparse

from chargequbit.cnot import verify_cnot
from chargequbit.config import default_config
from chargequbit.sweep import cnot_for, solve_dot


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--w", type=float, default=0.34)
    ap.add_argument("--R", type=float, nargs="+", default=[40.0, 50.0, 60.0])
    ap.add_argument("--step", type=float, default=0.5, help="grid step (nm)")
    args = ap.parse_args(argv)

    cfg = default_config().with_overrides(grid__step=args.step, well__w=args.w)
    dot = solve_dot(cfg, args.w)
    if dot.error:
        raise SystemExit(dot.error)
    print(f"w = {args.w}  r = {dot.qubit.r:.3f} nm  t_NOT = {dot.qubit.t_not:.4e} s")
    print(f"{'R_nm':>6} {'n':>6} {'t_cnot_s':>12} {'V_B/V_B0':>9} {'fid_id':>8} {'fid_not':>8}")
    for R in args.R:
        tm = cnot_for(cfg, dot, R)
        ident, flip = verify_cnot(tm)
        print(f"{R:6.1f} {tm.n:6d} {tm.t_cnot:12.4e} {tm.v_b_tuned / cfg.well.V_B:9.5f} {ident:8.5f} {flip:8.5f}")


if __name__ == "__main__":
    main()
