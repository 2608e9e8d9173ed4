"""Grid-step convergence of eps10, r and the decay rates at one barrier width.

    python3 scripts/convergence_study.py --w 0.2
"""

import argparse
import dataclasses

from chargequbit.config import default_config
from chargequbit.sweep import solve_dot


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--w", type=float, default=0.2)
    ap.add_argument("--steps", type=float, nargs="+", default=[1.0, 0.5, 0.25])
    args = ap.parse_args(argv)

    base = default_config()
    print(f"{'h_nm':>6} {'eps10_J':>14} {'r_nm':>10} {'w_da':>12} {'w_pa':>12} {'iters':>7}")
    for h in args.steps:
        cfg = base.with_overrides(grid__step=h)
        dot = solve_dot(cfg, args.w)
        if dot.error:
            print(f"{h:6.3f} failed: {dot.error}")
            continue
        rb = dot.rates
        print(f"{h:6.3f} {dot.qubit.eps10:14.6e} {dot.qubit.r:10.4f} {rb.w_da:12.4e} "
              f"{rb.w_piezo:12.4e} {dot.spectrum.iterations:7d}")


if __name__ == "__main__":
    main()
