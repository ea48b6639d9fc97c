#!/usr/bin/env python3
"""Final two-level transfer versus drive strength, linear and nonlinear.

The linear column should follow 1 - exp(-2 pi P1^2); the nonlinear one jumps
near 0.29 / sqrt(P3).
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from chirpdnls import DimensionlessParams, IntegratorConfig, TwoLevelState, integrate_two_level
from chirpdnls.regimes import lz_probability, nlz_threshold


def final_transfer(p1, p2, p3, tau_f):
    p = DimensionlessParams(p1, p2, p3, 2)
    traj = integrate_two_level(TwoLevelState(1.0, 0.0), p,
                               cfg=IntegratorConfig(1e-9, 1e-12, sample_every=tau_f), tau_end=tau_f)
    return float(traj.populations()[-1, 1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p2", type=float, default=100.0)
    ap.add_argument("--p3", type=float, default=5.0)
    ap.add_argument("--p1-max", type=float, default=1.0)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--out", type=Path, default=Path("out/transfer_vs_drive.csv"))
    args = ap.parse_args()

    p1s = np.linspace(args.p1_max / args.count, args.p1_max, args.count)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p1", "transfer_linear", "lz_formula", f"transfer_p3_{args.p3:g}"])
        for p1 in p1s:
            lin = final_transfer(p1, args.p2, 0.0, args.p2)
            nl = final_transfer(p1, args.p2, args.p3, args.p2)
            w.writerow([f"{p1:.6g}", f"{lin:.6g}", f"{lz_probability(p1):.6g}", f"{nl:.6g}"])
            print(f"P1={p1:.3f}  linear {lin:.3f} (LZ {lz_probability(p1):.3f})  nonlinear {nl:.3f}")
    print(f"nonlinear threshold estimate {nlz_threshold(args.p3):.3f}; wrote {args.out}")


if __name__ == "__main__":
    main()
