#!/usr/bin/env python3
"""Population of mode 1 versus time for the two-mode lattice (N=2).

Compares the linear case (smooth LZ step) with a strongly nonlinear one
(slow, nearly linear growth after the crossing).
"""

import argparse
import csv
from pathlib import Path

from chirpdnls import DimensionlessParams, IntegratorConfig, TwoLevelState, integrate_two_level


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p1", type=float, default=0.2)
    ap.add_argument("--p2", type=float, default=100.0)
    ap.add_argument("--p3", type=float, nargs="+", default=[0.0, 5.0])
    ap.add_argument("--tau-final", type=float, default=100.0)
    ap.add_argument("--out", type=Path, default=Path("out/two_level_dynamics.csv"))
    args = ap.parse_args()

    cfg = IntegratorConfig(1e-9, 1e-12, sample_every=0.25)
    columns = {}
    for p3 in args.p3:
        p = DimensionlessParams(args.p1, args.p2, p3, 2)
        traj = integrate_two_level(TwoLevelState(1.0, 0.0), p, cfg=cfg, tau_end=args.tau_final)
        columns[p3] = traj.populations()[:, 1]
        print(f"P3={p3:g}: final |b1|^2 = {columns[p3][-1]:.4f}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau"] + [f"pop1_p3_{p3:g}" for p3 in args.p3])
        for i, tau in enumerate(traj.tau):
            w.writerow([f"{tau:.6g}"] + [f"{columns[p3][i]:.8g}" for p3 in args.p3])
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
