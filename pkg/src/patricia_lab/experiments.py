"""Seeded Monte Carlo runs: sample strings, build trees, record and aggregate heights."""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import rng
from .bitstreams import (
    DEFAULT_MAX_DEPTH,
    DistributionSpec,
    as_mixture,
    beta_of,
    count_prefix_matches,
    sample_string,
    spec_to_json,
)
from .bounds import devroye_tail
from .patricia import build_by_insertion, build_patricia, distinct_first_one_count

THREADS_ENV = "PATRICIA_LAB_THREADS"

TRIAL_HEADER = ["dist", "params", "n", "trial", "seed", "height", "distinct_first_one",
                "prefix_match_count", "max_split_index", "elapsed_ms"]
SUMMARY_HEADER = ["dist", "params", "n", "trials", "mean_height", "std_height", "h_over_n",
                  "h_over_log2n", "h_over_floor", "mean_distinct"]


@dataclass(frozen=True)
class ExperimentConfig:
    spec: DistributionSpec
    n_grid: tuple
    trials: int
    seed: int
    max_depth: int = DEFAULT_MAX_DEPTH
    emit_per_trial: bool = True
    builder: str = "bulk"  # or "insert"
    record_timing: bool = False

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or any(n < 1 for n in grid):
            raise ValueError("n_grid must be a nonempty list of positive integers")
        if list(grid) != sorted(grid):
            raise ValueError("n_grid must be sorted ascending")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit value")
        if self.builder not in ("bulk", "insert"):
            raise ValueError(f"unknown builder {self.builder!r}")


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial_index: int
    height: int
    distinct_first_one: int
    prefix_match_count: int
    max_split_index: int
    elapsed: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class SummaryRow:
    n: int
    trials: int
    mean_height: float
    std_height: float
    min_height: int
    max_height: int
    mean_ratio_h_over_n: float
    mean_ratio_h_over_log2n: float | None
    mean_ratio_h_over_floor: float | None
    mean_distinct: float
    # (t, threshold, empirical tail, devroye bound)
    tails: tuple = ()


@dataclass(frozen=True)
class Summary:
    spec: DistributionSpec
    rows: tuple

    def row(self, n) -> SummaryRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def string_key(seed, n, trial_index, string_index):
    return rng.derive_key(seed, rng.PURPOSE_STRING, n, trial_index, string_index)


def sample_strings(spec, seed, n, trial_index, max_depth=DEFAULT_MAX_DEPTH):
    return [sample_string(spec, string_key(seed, n, trial_index, j), j, max_depth)
            for j in range(n)]


def mixture_prefix(spec, n):
    """The prefix 0^(beta_n - 1) 1 counted by X_n, or None for non-mixture laws."""
    mix = as_mixture(spec)
    if mix is None:
        return None
    b = beta_of(mix.alpha, n)
    return "0" * (b - 1) + "1"


def height_floor(spec, n):
    """n / alpha_n for the mixture laws (using the transformed sequence for nu)."""
    mix = as_mixture(spec)
    if mix is None:
        return None
    return n / mix.alpha.value(n)


def run_trial(config: ExperimentConfig, n: int, trial_index: int) -> TrialRecord:
    t0 = time.perf_counter()
    strings = sample_strings(config.spec, config.seed, n, trial_index, config.max_depth)
    try:
        if config.builder == "insert":
            tree = build_by_insertion(strings)
        else:
            tree = build_patricia(strings)
    except RuntimeError as exc:
        raise RuntimeError(f"trial (n={n}, trial={trial_index}) failed: {exc}") from exc
    v = mixture_prefix(config.spec, n)
    return TrialRecord(
        n=n,
        trial_index=trial_index,
        height=tree.height(),
        distinct_first_one=distinct_first_one_count(strings),
        prefix_match_count=count_prefix_matches(strings, v) if v else 0,
        max_split_index=tree.max_split_index(),
        elapsed=time.perf_counter() - t0,
    )


def _run_one(args):
    config, n, trial = args
    return run_trial(config, n, trial)


def worker_count(requested=None) -> int:
    cap = os.environ.get(THREADS_ENV)
    w = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        w = min(w, max(1, int(cap)))
    return max(1, w)


def run_grid(config: ExperimentConfig, workers=None):
    """All (n, trial) pairs, returned sorted by n then trial, plus their Summary."""
    tasks = [(config, n, t) for n in config.n_grid for t in range(config.trials)]
    w = worker_count(workers)
    if w > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=w) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * w))))
    else:
        records = [_run_one(t) for t in tasks]
    records.sort(key=lambda r: (r.n, r.trial_index))
    return records, summarize(config.spec, records)


def empirical_tail(heights, threshold) -> float:
    """Fraction of heights <= threshold."""
    if not heights:
        raise ValueError("empirical_tail needs at least one height")
    return sum(1 for h in heights if h <= threshold) / len(heights)


def tail_offsets(n):
    r = math.isqrt(n - 1) + 1 if n > 1 else 1  # ceil(sqrt(n))
    return (r, 2 * r, 4 * r)


def summarize(spec, records) -> Summary:
    by_n = {}
    for r in sorted(records, key=lambda r: (r.n, r.trial_index)):
        by_n.setdefault(r.n, []).append(r)
    rows = []
    for n, recs in by_n.items():
        hs = [r.height for r in recs]
        mean = statistics.fmean(hs)
        floor = height_floor(spec, n)
        tails = tuple(
            (t, mean - t, empirical_tail(hs, mean - t), devroye_tail(n, t))
            for t in tail_offsets(n)
        )
        rows.append(SummaryRow(
            n=n,
            trials=len(recs),
            mean_height=mean,
            std_height=statistics.stdev(hs) if len(hs) > 1 else 0.0,
            min_height=min(hs),
            max_height=max(hs),
            mean_ratio_h_over_n=mean / n,
            mean_ratio_h_over_log2n=mean / math.log2(n) if n > 1 else None,
            mean_ratio_h_over_floor=mean / floor if floor else None,
            mean_distinct=statistics.fmean(r.distinct_first_one for r in recs),
            tails=tails,
        ))
    return Summary(spec, tuple(rows))


def enk_event(strings, k, eps) -> bool:
    """Whether some k-bit prefix is shared by at least 2 eps n of the n strings."""
    counts = Counter(s.block(1, k) for s in strings)
    return max(counts.values()) >= 2 * eps * len(strings)


# ---------------------------------------------------------------------------
# CSV


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def spec_label(spec):
    rec = spec_to_json(spec)
    law = rec.pop("law")
    return law, json.dumps(rec, sort_keys=True, separators=(",", ":"))


def write_trials_csv(path, config: ExperimentConfig, records):
    dist, params = spec_label(config.spec)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRIAL_HEADER)
        for r in records:
            elapsed = round(r.elapsed * 1000, 3) if config.record_timing else None
            w.writerow([dist, params, r.n, r.trial_index, config.seed, r.height,
                        r.distinct_first_one, r.prefix_match_count, r.max_split_index,
                        _fmt(elapsed)])


def write_summary_csv(path, summary: Summary):
    dist, params = spec_label(summary.spec)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in summary.rows:
            w.writerow([dist, params, r.n, r.trials, _fmt(r.mean_height), _fmt(r.std_height),
                        _fmt(r.mean_ratio_h_over_n), _fmt(r.mean_ratio_h_over_log2n),
                        _fmt(r.mean_ratio_h_over_floor), _fmt(r.mean_distinct)])


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
