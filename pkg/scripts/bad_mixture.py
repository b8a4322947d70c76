#!/usr/bin/env python3
"""Heights under the mixture law against the n / alpha_n floor, plus the X_n counts."""

import argparse
import os
from dataclasses import dataclass

from patricia_lab.bitstreams import BadMixture, Power, beta_of
from patricia_lab.bounds import okamoto_bound
from patricia_lab.experiments import (
    ExperimentConfig,
    run_grid,
    write_summary_csv,
    write_trials_csv,
)


@dataclass(frozen=True)
class MixtureRun:
    eps: float = 0.5
    a_cap: int = 1 << 20
    n_grid: tuple = (256, 1024, 4096)
    trials: int = 100
    seed: int = 7
    out: str = "runs/mixture"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=MixtureRun.eps)
    ap.add_argument("--trials", type=int, default=MixtureRun.trials)
    ap.add_argument("--seed", type=int, default=MixtureRun.seed)
    ap.add_argument("--out", default=MixtureRun.out)
    args = ap.parse_args()
    run = MixtureRun(eps=args.eps, trials=args.trials, seed=args.seed, out=args.out)

    alpha = Power(run.eps)
    cfg = ExperimentConfig(BadMixture(alpha, run.a_cap), run.n_grid, run.trials, run.seed)
    records, summary = run_grid(cfg)
    os.makedirs(run.out, exist_ok=True)
    write_trials_csv(os.path.join(run.out, "trials.csv"), cfg, records)
    write_summary_csv(os.path.join(run.out, "summary.csv"), summary)

    print(f"{'n':>6} {'alpha_n':>9} {'beta':>4} {'mean H':>9} {'n/alpha':>8} "
          f"{'mean X':>8} {'P(X<2n/a)':>10} {'bound':>9}")
    for row in summary.rows:
        n = row.n
        a = alpha.value(n)
        xs = [r.prefix_match_count for r in records if r.n == n]
        low = sum(x < 2 * n / a for x in xs) / len(xs)
        print(f"{n:>6} {a:>9.2f} {beta_of(alpha, n):>4} {row.mean_height:>9.1f} {n / a:>8.1f} "
              f"{sum(xs) / len(xs):>8.1f} {low:>10.4f} {okamoto_bound(n, max(a, 8)):>9.3g}")


if __name__ == "__main__":
    main()
