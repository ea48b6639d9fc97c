#!/usr/bin/env python3
"""Excitation efficiency over the (P1, P2) plane at N=80 with the regime lines.

Writes sweep.csv (efficiency and regime label per point), the boundary-line
CSVs and final-mode histograms at a few representative points.
"""

import argparse
from pathlib import Path

from chirpdnls.config import ExperimentConfig
from chirpdnls.experiments import run_boundaries, run_single, run_sweep, write_sweep_csv
from chirpdnls.modes import write_histogram_csv
from chirpdnls.regimes import write_boundary_csv

HISTOGRAM_POINTS = {"ladder": (0.8, 20.0), "autoresonance": (0.8, 1.0), "below_ar": (0.1, 0.5)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=80)
    ap.add_argument("--p3", type=float, default=0.0)
    ap.add_argument("--count", type=int, default=6, help="grid points per axis")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("out/regime_map"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    base = ExperimentConfig(n_sites=args.n_sites, p3=args.p3, sample_every=5.0, jobs=args.jobs,
                            sweep_p1=f"0.1:1.3:{args.count}:log",
                            sweep_p2=f"0.5:24:{args.count}:log")
    rows = run_sweep(base)
    write_sweep_csv(rows, args.out / "sweep.csv")
    for r in rows:
        print(f"P1={r.p1:7.4f} P2={r.p2:8.4f} efficiency={r.efficiency:.3f} {r.regime} {r.error}")
    for kind, pts in run_boundaries(base).items():
        write_boundary_csv(kind, pts, args.out / f"boundary_{kind}.csv")
    for name, (p1, p2) in HISTOGRAM_POINTS.items():
        res = run_single(base.replace(p1=p1, p2=p2, sweep_p1=None, sweep_p2=None))
        write_histogram_csv(res.final, res.ladder, args.out / f"histogram_{name}.csv")
        print(f"histogram {name}: P1={p1} P2={p2} efficiency={res.efficiency:.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
