#!/usr/bin/env python3
"""Where the separatrix lower edge reaches a given wavenumber at tau_15.

Prints the P2 root for each P1 (NaN where the trapping region never grows that
large) next to the autoresonance line P2 = 1/(4 P1).
"""

import argparse
import math

import numpy as np

from chirpdnls.rays import separatrix_boundary
from chirpdnls.regimes import ar_threshold_p2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p1-min", type=float, default=0.1)
    ap.add_argument("--p1-max", type=float, default=10.0)
    ap.add_argument("--count", type=int, default=25)
    ap.add_argument("--k-edge", type=float, default=math.pi / 4)
    ap.add_argument("--n-sites", type=int, default=80)
    args = ap.parse_args()

    p1s = np.geomspace(args.p1_min, args.p1_max, args.count)
    p2s = separatrix_boundary(p1s, n_sites=args.n_sites, k_edge=args.k_edge)
    for p1, p2 in zip(p1s, p2s):
        print(f"P1={p1:8.4f}  P2_edge={p2:10.5f}  P2_ar={ar_threshold_p2(p1):10.5f}")


if __name__ == "__main__":
    main()
