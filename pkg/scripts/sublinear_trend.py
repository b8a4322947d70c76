#!/usr/bin/env python3
"""Mean height over n for the fair-coin law and a fixed bad law, side by side.

Writes one summary CSV per law plus an SVG of h_over_n against n.
"""

import argparse
import os
from dataclasses import dataclass

from patricia_lab.bitstreams import BadMuN, Bernoulli
from patricia_lab.experiments import ExperimentConfig, run_grid, write_summary_csv
from patricia_lab.plot import emit_svg


@dataclass(frozen=True)
class TrendRun:
    n_grid: tuple = (1 << 8, 1 << 10, 1 << 12, 1 << 14)
    trials: int = 50
    seed: int = 1
    bad_N: int = 64
    out: str = "runs/trend"
    workers: int | None = None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=TrendRun.trials)
    ap.add_argument("--seed", type=int, default=TrendRun.seed)
    ap.add_argument("--out", default=TrendRun.out)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    run = TrendRun(trials=args.trials, seed=args.seed, out=args.out, workers=args.workers)

    os.makedirs(run.out, exist_ok=True)
    combined = os.path.join(run.out, "summary.csv")
    lines = []
    for spec in (Bernoulli(0.5), BadMuN(run.bad_N)):
        _, summary = run_grid(ExperimentConfig(spec, run.n_grid, run.trials, run.seed),
                              workers=run.workers)
        path = os.path.join(run.out, f"{type(spec).__name__}.csv")
        write_summary_csv(path, summary)
        with open(path) as f:
            body = f.read().splitlines()
        lines = lines or body[:1]
        lines += body[1:]
        for r in summary.rows:
            print(f"{spec!r:28} n={r.n:>6}  H={r.mean_height:9.2f}  H/n={r.mean_ratio_h_over_n:.4f}")
    with open(combined, "w") as f:
        f.write("\n".join(lines) + "\n")
    emit_svg(combined, "n", "h_over_n", os.path.join(run.out, "h_over_n.svg"))
    print(f"wrote {run.out}")


if __name__ == "__main__":
    main()
