#!/usr/bin/env python3
"""Fair-coin heights divided by log2 n, next to log2 n + sqrt(2 log2 n).

The second column shows how slowly the ratio approaches its limit of 1: the
sqrt term keeps it near 1.3 throughout the range a desktop can simulate.
"""

import argparse
import math

from patricia_lab.bitstreams import Bernoulli
from patricia_lab.experiments import ExperimentConfig, run_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-log2n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()

    grid = tuple(1 << k for k in range(6, args.max_log2n + 1, 2))
    _, summary = run_grid(ExperimentConfig(Bernoulli(0.5), grid, args.trials, args.seed),
                          workers=args.workers)
    print(f"{'n':>8} {'mean H':>8} {'H/log2 n':>9} {'(L+sqrt(2L))/L':>15}")
    for r in summary.rows:
        L = math.log2(r.n)
        print(f"{r.n:>8} {r.mean_height:>8.2f} {r.mean_ratio_h_over_log2n:>9.4f} "
              f"{(L + math.sqrt(2 * L)) / L:>15.4f}")


if __name__ == "__main__":
    main()
