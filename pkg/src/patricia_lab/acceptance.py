"""Exit criteria for the toolkit, each a function returning a ``CriterionResult``.

Used by ``tests/test_acceptance.py`` and by ``patricia-lab verify``.
"""

from __future__ import annotations

import math
import os
import random
import tempfile
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import rng
from .bitstreams import (
    BadMixture,
    BadMuN,
    Bernoulli,
    LazyBitString,
    NuForAlpha,
    Power,
    beta_of,
    prefix_probability,
    sample_string,
)
from .bounds import (
    chernoff_enk_bound,
    devroye_tail,
    distinct_lower_bound,
    okamoto_bound,
    proportion_se,
    thm2_height_floor,
)
from .experiments import (
    ExperimentConfig,
    empirical_tail,
    enk_event,
    run_grid,
    sample_strings,
    tail_offsets,
)
from .patricia import (
    build_by_insertion,
    build_patricia,
    build_trie,
    compress,
    distinct_first_one_count,
    validate,
)

SEED = 20240518
SE_SLACK = 4.0

REFERENCE_PREFIXES = ("00000", "00001", "0100", "0101", "1100", "1101")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d}. {self.name} ({self.seconds:.1f}s): {self.detail}"


def fixed_string(prefix: str, string_id: int, key: int = 0) -> LazyBitString:
    """A string with the given finite prefix followed by fair coins."""
    ones = tuple(i + 1 for i, c in enumerate(prefix) if c == "1")
    return LazyBitString(string_id, None, rng.derive_key(key, string_id), ones=ones,
                         tail_start=len(prefix) + 1)


def reference_strings():
    return [fixed_string(p, j, key=SEED) for j, p in enumerate(REFERENCE_PREFIXES)]


def mu_n_prefix_by_enumeration(N: int, v: str) -> Fraction:
    """P(prefix v) under mu_N by summing over every value of T."""
    m = N * N
    total = Fraction(0)
    k = len(v)
    for t in range(1, m + 1):
        ok = True
        free = 0
        for i, c in enumerate(v, start=1):
            if i < t and c != "0" or i == t and c != "1":
                ok = False
                break
            if i > t:
                free += 1
        if ok:
            total += Fraction(1, m) * Fraction(1, 2 ** free)
    return total


# ---------------------------------------------------------------------------


def _timed(number, name):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(number, name, passed, detail, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _random_law(r: random.Random):
    kind = r.randrange(4)
    if kind == 0:
        return Bernoulli(r.choice([0.5, 0.3, 0.8]))
    if kind == 1:
        return BadMuN(r.choice([1, 2, 8, 64, 1000]))
    if kind == 2:
        return BadMixture(Power(r.choice([0.3, 0.5, 0.8])), r.choice([2, 16, 1 << 20]))
    return NuForAlpha(Power(r.choice([0.5, 0.9])), r.choice([4, 1 << 20]))


@_timed(1, "structural invariants over 10^4 random trees")
def criterion_structural():
    r = random.Random(SEED)
    trees = 10_000
    bad = []
    laws = Counter()
    for i in range(trees):
        spec = _random_law(r)
        laws[spec.law] += 1
        # log-uniform n on 1..512, endpoints included
        n = 1 if i % 500 == 0 else 512 if i % 500 == 1 else int(512 ** r.random())
        strings = sample_strings(spec, SEED, n, i)
        tree = build_by_insertion(strings) if i % 2 else build_patricia(strings)
        h = tree.height()
        problems = validate(tree)
        if problems:
            bad.append((i, problems[0]))
        if h > n - 1 or tree.internal_count != n - 1 or tree.leaf_count != n:
            bad.append((i, f"counts: n={n} h={h} internal={tree.internal_count}"))
        if distinct_first_one_count(strings) - 1 > h:
            bad.append((i, "height below distinct first-one count - 1"))
    detail = f"{trees} trees, laws {dict(sorted(laws.items()))}, {len(bad)} violations"
    if bad:
        detail += f"; first: {bad[0]}"
    return not bad and len(laws) == 4, detail


def _small_law(r: random.Random):
    kind = r.randrange(4)
    if kind == 0:
        return Bernoulli(r.choice([0.5, 0.25]))
    if kind == 1:
        return BadMuN(r.choice([1, 2, 3, 4, 8]))
    if kind == 2:
        return BadMixture(Power(0.5), r.choice([2, 4]))
    return NuForAlpha(Power(0.5), 4)


@_timed(2, "insert order invariance vs compress(build_trie)")
def criterion_oracle_equivalence():
    r = random.Random(SEED + 2)
    mismatches = 0
    for i in range(500):
        spec = _small_law(r)
        n = r.randint(1, 64)
        strings = sample_strings(spec, SEED, n, i)
        ref = compress(build_trie(strings)).shape()
        if build_patricia(strings).shape() != ref:
            mismatches += 1
        for _ in range(3):
            order = strings[:]
            r.shuffle(order)
            if build_by_insertion(order).shape() != ref:
                mismatches += 1
    return mismatches == 0, f"500 sets x (3 insert orders + bulk), {mismatches} mismatches"


@_timed(3, "six-string reference fixture")
def criterion_reference_fixture():
    strings = reference_strings()
    trie = build_trie(strings)
    tree = compress(trie)
    got = (trie.height(), tree.height(), tree.leaf_count, tree.internal_count)
    ok = got == (5, 3, 6, 5) and not validate(tree)
    return ok, f"trie height, patricia height, leaves, internal = {got} (want (5, 3, 6, 5))"


PREFIX_LAWS = (
    Bernoulli(0.5),
    Bernoulli(0.3),
    BadMuN(2),
    BadMuN(4),
    BadMuN(1000),
    BadMixture(Power(0.5)),
    BadMixture(Power(0.5), 2),
    NuForAlpha(Power(0.5)),
)


@_timed(4, "prefix probabilities: normalization, Monte Carlo, enumeration")
def criterion_prefix_probability():
    worst_norm = 0.0
    worst_z = 0.0
    failures = []
    for spec in PREFIX_LAWS:
        for k in range(1, 13):
            total = math.fsum(prefix_probability(spec, v) for v in product((0, 1), repeat=k))
            worst_norm = max(worst_norm, abs(total - 1))
        samples = 100_000
        counts = Counter()
        for j in range(samples):
            s = sample_string(spec, rng.derive_key(SEED, 4, j))
            counts[s.prefix(6)] += 1
        for k in range(1, 7):
            freq = Counter()
            for p6, c in counts.items():
                freq[p6[:k]] += c
            for v in product("01", repeat=k):
                v = "".join(v)
                p = prefix_probability(spec, v)
                p_hat = freq[v] / samples
                # rare prefixes: a handful of hits against an expected count below one
                # would blow up a z-score built from p alone, so take the wider SE
                se = max(proportion_se(p, samples), proportion_se(p_hat, samples))
                diff = abs(p_hat - p)
                if se == 0:
                    if diff > 0:
                        failures.append((spec, v, "nonzero frequency of impossible prefix"))
                    continue
                worst_z = max(worst_z, diff / se)
                if diff > SE_SLACK * se:
                    failures.append((spec, v, diff / se))
    enum_bad = 0
    for N in (1, 2, 3, 4):
        for k in range(1, 9):
            for v in product("01", repeat=k):
                v = "".join(v)
                exact = mu_n_prefix_by_enumeration(N, v)
                if prefix_probability(BadMuN(N), v) != float(exact):
                    enum_bad += 1
    ok = worst_norm <= 1e-12 and not failures and enum_bad == 0
    detail = (f"max |sum - 1| = {worst_norm:.2e}, worst MC z = {worst_z:.2f}, "
              f"{len(failures)} MC failures, {enum_bad} enumeration mismatches")
    return ok, detail


@_timed(5, "mu_N height floor at desk scale")
def criterion_mu_n_floor():
    cfg = ExperimentConfig(BadMuN(1000), (100, 500, 1000), 200, SEED)
    _, summary = run_grid(cfg, workers=1)
    ok = True
    parts = []
    for row in summary.rows:
        floor_a = distinct_lower_bound(row.n, 1000) - 0.5
        good = row.mean_height >= row.n - 3 and row.mean_distinct >= floor_a
        ok &= good
        parts.append(f"n={row.n}: mean H={row.mean_height:.2f} (>= {row.n - 3}), "
                     f"mean |A|={row.mean_distinct:.2f} (>= {floor_a:.3f})")
    return ok, "; ".join(parts)


@_timed(6, "sublinear height trend")
def criterion_sublinear_trend():
    grid = (1 << 10, 1 << 12, 1 << 14)
    ok = True
    parts = []
    for spec in (Bernoulli(0.5), BadMuN(64)):
        _, summary = run_grid(ExperimentConfig(spec, grid, 50, SEED), workers=1)
        ratios = [row.mean_ratio_h_over_n for row in summary.rows]
        good = all(a > b for a, b in zip(ratios, ratios[1:]))
        if isinstance(spec, Bernoulli):
            good &= ratios[-1] < 0.01
        ok &= good
        parts.append(f"{spec.law}: H/n = " + ", ".join(f"{x:.4f}" for x in ratios))
    return ok, "; ".join(parts)


@_timed(7, "symmetric Bernoulli height vs log2 n")
def criterion_pittel():
    n = 1 << 16
    _, summary = run_grid(ExperimentConfig(Bernoulli(0.5), (n,), 30, SEED), workers=1)
    ratio = summary.rows[0].mean_ratio_h_over_log2n
    ok = 0.85 <= ratio <= 1.20
    return ok, f"n=2^16, 30 trials: mean H/log2 n = {ratio:.4f} (want within [0.85, 1.20])"


@_timed(8, "mixture law height floor and Okamoto bound")
def criterion_mixture():
    n = 4096
    alpha = Power(0.5)
    spec = BadMixture(alpha, 1 << 20)
    trials = 100
    records, summary = run_grid(ExperimentConfig(spec, (n,), trials, SEED), workers=1)
    alpha_n = alpha.value(n)
    floor = thm2_height_floor(n, alpha_n)
    mean_h = summary.rows[0].mean_height
    low = sum(1 for r in records if r.prefix_match_count < 2 * n / alpha_n) / trials
    bound = okamoto_bound(n, alpha_n)
    se = proportion_se(low, trials)
    mean_x = sum(r.prefix_match_count for r in records) / trials
    ok = mean_h >= floor and mean_h >= 200 and low <= bound + SE_SLACK * se
    detail = (f"beta_n={beta_of(alpha, n)}, mean H={mean_h:.1f} (floor {floor:g}, want >= 200), "
              f"mean X_n={mean_x:.1f}, P(X_n < {2 * n / alpha_n:g}) = {low:.4f} "
              f"vs bound {bound:.3g} + {SE_SLACK:g} SE")
    return ok, detail


@_timed(9, "Devroye lower-tail domination")
def criterion_devroye():
    ok = True
    parts = []
    for spec, n in ((BadMuN(64), 64), (Bernoulli(0.5), 1024)):
        trials = 2000
        records, _ = run_grid(ExperimentConfig(spec, (n,), trials, SEED), workers=1)
        hs = [r.height for r in records]
        mean = sum(hs) / trials
        for t in tail_offsets(n):
            emp = empirical_tail(hs, mean - t)
            bound = devroye_tail(n, t)
            good = emp <= bound + SE_SLACK * proportion_se(emp, trials)
            ok &= good
            parts.append(f"{spec.law} n={n} t={t}: {emp:.4f} <= {bound:.4f}")
    return ok, "; ".join(parts)


@_timed(10, "Chernoff bound on E_{n,k}")
def criterion_chernoff():
    eps, k, trials = 0.2, 3, 2000
    spec = Bernoulli(0.5)
    ok = True
    parts = []
    for n in (200, 1000):
        hits = sum(enk_event(sample_strings(spec, SEED + 10, n, t), k, eps) for t in range(trials))
        freq = hits / trials
        bound = chernoff_enk_bound(n, k, eps)
        good = freq <= bound + SE_SLACK * proportion_se(freq, trials)
        ok &= good
        parts.append(f"n={n}: freq {freq:.4f} vs bound {bound:.3g}")
    return ok, "; ".join(parts)


@_timed(11, "simulate output reproducibility")
def criterion_reproducible():
    from .cli import run_cli

    args = ["simulate", "--dist", '{"law":"mu_n","N":100}', "--n", "10,50,200",
            "--trials", "20", "--seed", "42"]
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run, workers in enumerate(("1", "1", "2")):
            out = os.path.join(tmp, f"run{run}")
            code = run_cli(args + ["--out", out, "--workers", workers, "--quiet"])
            if code != 0:
                return False, f"simulate exited with {code}"
            blobs.append(tuple(open(os.path.join(out, f), "rb").read()
                               for f in ("trials.csv", "summary.csv")))
    same_runs = blobs[0] == blobs[1]
    same_workers = blobs[0] == blobs[2]
    return same_runs and same_workers, (
        f"repeat identical: {same_runs}, 1 vs 2 workers identical: {same_workers}")


CRITERIA = (
    criterion_structural,
    criterion_oracle_equivalence,
    criterion_reference_fixture,
    criterion_prefix_probability,
    criterion_mu_n_floor,
    criterion_sublinear_trend,
    criterion_pittel,
    criterion_mixture,
    criterion_devroye,
    criterion_chernoff,
    criterion_reproducible,
)


def run_all(only=None, echo=print):
    results = []
    for number, fn in enumerate(CRITERIA, start=1):
        if only and number not in only:
            continue
        res = fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
