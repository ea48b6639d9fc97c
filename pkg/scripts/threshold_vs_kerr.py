#!/usr/bin/env python3
"""Half-transfer drive strength of the two-mode lattice versus Kerr strength."""

import argparse
import csv
import math
from pathlib import Path

from chirpdnls.config import ExperimentConfig
from chirpdnls.experiments import run_threshold
from chirpdnls.regimes import LZ_HALF_TRANSFER_P1, lz_nlz_crossover_p3, nlz_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p2", type=float, default=200.0)
    ap.add_argument("--p3", type=float, nargs="+", default=[0.0, 0.1, 0.3, 1.0, 3.0, 10.0])
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--out", type=Path, default=Path("out/threshold_vs_kerr.csv"))
    args = ap.parse_args()

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p3", "p1_threshold", "lz_value", "nlz_value"])
        for p3 in args.p3:
            cfg = ExperimentConfig(n_sites=2, p2=args.p2, p3=p3, tau_final=args.p2, rtol=1e-7,
                                   sample_every=args.p2, threshold_lo=0.02, threshold_hi=1.0,
                                   threshold_tol=args.tol)
            x = run_threshold(cfg).p1_threshold
            nlz = nlz_threshold(p3) if p3 > 0 else math.nan
            w.writerow([p3, f"{x:.6g}", f"{LZ_HALF_TRANSFER_P1:.6g}", f"{nlz:.6g}"])
            print(f"P3={p3:<6g} P1cr={x:.4f}  LZ {LZ_HALF_TRANSFER_P1:.4f}  NLZ {nlz:.4f}")
    print(f"branches meet at P3 = {lz_nlz_crossover_p3():.3f}; wrote {args.out}")


if __name__ == "__main__":
    main()
