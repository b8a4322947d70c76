"""Command-line front end: ``patricia-lab <subcommand> ...``.

Exit codes: 0 success, 1 failed criterion or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections import Counter

from . import rng
from .bitstreams import prefix_probability, sample_string, spec_from_json
from .bounds import (
    chernoff_enk_bound,
    devroye_tail,
    distinct_lower_bound,
    okamoto_bound,
    thm2_height_floor,
)
from .experiments import ExperimentConfig, run_grid, write_summary_csv, write_trials_csv
from .plot import emit_svg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--n expects comma-separated integers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="patricia-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a seeded Monte Carlo grid and write CSVs")
    sim.add_argument("--config", help="JSON file; inline flags override it")
    sim.add_argument("--dist", help='law record, e.g. \'{"law":"mu_n","N":1000}\'')
    sim.add_argument("--n", help="comma-separated n grid")
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", help="output directory")
    sim.add_argument("--workers", type=int)
    sim.add_argument("--max-depth", type=int)
    sim.add_argument("--builder", choices=("bulk", "insert"))
    sim.add_argument("--no-per-trial", action="store_true", help="skip trials.csv")
    sim.add_argument("--timing", action="store_true", help="fill the elapsed_ms column")
    sim.add_argument("--quiet", action="store_true")

    b = sub.add_parser("bounds", help="evaluate a closed-form bound")
    b.add_argument("kind", choices=("chernoff", "okamoto", "devroye", "distinct", "thm2"))
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int)
    b.add_argument("--eps", type=float)
    b.add_argument("--alpha", type=float)
    b.add_argument("--t", type=float)
    b.add_argument("--N", type=int)

    pp = sub.add_parser("prefix-prob", help="exact (and optional Monte Carlo) prefix probability")
    pp.add_argument("--dist", required=True)
    pp.add_argument("--prefix", required=True)
    pp.add_argument("--samples", type=int, default=0)
    pp.add_argument("--seed", type=int)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("--only", help="comma-separated criterion numbers")

    pl = sub.add_parser("plot", help="render summary CSV columns as SVG")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--x", default="n")
    pl.add_argument("--y", default="h_over_n")
    pl.add_argument("--out", required=True)
    return p


def _simulate(args):
    conf = {}
    if args.config:
        with open(args.config) as f:
            conf = json.load(f)
    for key in ("dist", "n", "trials", "seed", "out", "workers", "max_depth", "builder"):
        val = getattr(args, key)
        if val is not None:
            conf[key] = val
    for key in ("dist", "n", "trials", "seed", "out"):
        if key not in conf:
            raise UsageError(f"simulate: --{key} is required (flag or config file)")
    dist = conf["dist"]
    spec = spec_from_json(dist if isinstance(dist, (str, dict)) else json.dumps(dist))
    grid = conf["n"] if isinstance(conf["n"], list) else _int_list(conf["n"])
    cfg = ExperimentConfig(
        spec=spec,
        n_grid=tuple(grid),
        trials=int(conf["trials"]),
        seed=int(conf["seed"]),
        max_depth=int(conf.get("max_depth", ExperimentConfig.max_depth)),
        emit_per_trial=not args.no_per_trial and conf.get("per_trial", True),
        builder=conf.get("builder", "bulk"),
        record_timing=args.timing or bool(conf.get("timing", False)),
    )
    records, summary = run_grid(cfg, workers=conf.get("workers"))
    out = conf["out"]
    os.makedirs(out, exist_ok=True)
    if cfg.emit_per_trial:
        write_trials_csv(os.path.join(out, "trials.csv"), cfg, records)
    write_summary_csv(os.path.join(out, "summary.csv"), summary)
    if not args.quiet:
        print(f"{'n':>8} {'mean H':>10} {'std':>8} {'H/n':>8} {'H/log2n':>8} {'mean |A|':>10}")
        for r in summary.rows:
            hl = f"{r.mean_ratio_h_over_log2n:.4f}" if r.mean_ratio_h_over_log2n else "-"
            print(f"{r.n:>8} {r.mean_height:>10.3f} {r.std_height:>8.3f} "
                  f"{r.mean_ratio_h_over_n:>8.4f} {hl:>8} {r.mean_distinct:>10.2f}")
        print(f"wrote {out}")
    return 0


def _bounds(args):
    need = {
        "chernoff": ("k", "eps"),
        "okamoto": ("alpha",),
        "devroye": ("t",),
        "distinct": ("N",),
        "thm2": ("alpha",),
    }[args.kind]
    for name in need:
        if getattr(args, name) is None:
            raise UsageError(f"bounds {args.kind}: --{name} is required")
    if args.kind == "chernoff":
        val = chernoff_enk_bound(args.n, args.k, args.eps)
    elif args.kind == "okamoto":
        val = okamoto_bound(args.n, args.alpha)
    elif args.kind == "devroye":
        val = devroye_tail(args.n, args.t)
    elif args.kind == "distinct":
        val = distinct_lower_bound(args.n, args.N)
    else:
        val = thm2_height_floor(args.n, args.alpha)
    print(format(val, ".10g"))
    return 0


def _prefix_prob(args):
    spec = spec_from_json(args.dist)
    exact = prefix_probability(spec, args.prefix)
    print(format(exact, ".12g"))
    if args.samples:
        if args.seed is None:
            raise UsageError("prefix-prob: --samples needs --seed")
        k = len(args.prefix)
        hits = Counter(sample_string(spec, rng.derive_key(args.seed, j)).prefix(k) == args.prefix
                       for j in range(args.samples))
        freq = hits[True] / args.samples
        se = math.sqrt(exact * (1 - exact) / args.samples)
        print(f"monte carlo: {freq:.6g} over {args.samples} samples (se {se:.3g})")
    return 0


def _verify(args):
    from .acceptance import run_all

    only = set(_int_list(args.only)) if args.only else None
    results = run_all(only)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def _plot(args):
    emit_svg(args.csv, args.x, args.y, args.out)
    print(f"wrote {args.out}")
    return 0


COMMANDS = {
    "simulate": _simulate,
    "bounds": _bounds,
    "prefix-prob": _prefix_prob,
    "verify": _verify,
    "plot": _plot,
}


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 2
    except (ValueError, json.JSONDecodeError, KeyError) as exc:
        print(f"patricia-lab: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"patricia-lab: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
