import math
import statistics

import pytest

from patricia_lab.bitstreams import BadMixture, BadMuN, Bernoulli, NuForAlpha, Power
from patricia_lab.bounds import okamoto_bound, proportion_se
from patricia_lab.experiments import (
    SUMMARY_HEADER,
    TRIAL_HEADER,
    ExperimentConfig,
    empirical_tail,
    enk_event,
    height_floor,
    mixture_prefix,
    read_csv,
    run_grid,
    run_trial,
    sample_strings,
    string_key,
    tail_offsets,
    worker_count,
    write_summary_csv,
    write_trials_csv,
)


def test_single_string_trial():
    rec = run_trial(ExperimentConfig(Bernoulli(0.5), (1,), 1, 3), 1, 0)
    assert rec.height == 0
    assert rec.distinct_first_one == 1
    assert rec.max_split_index == 0


def test_two_strings_with_distinct_first_ones():
    cfg = ExperimentConfig(BadMuN(4), (2,), 1, 0)
    hits = 0
    for trial in range(50):
        strings = sample_strings(cfg.spec, cfg.seed, 2, trial)
        if strings[0].T == strings[1].T:
            continue
        rec = run_trial(cfg, 2, trial)
        assert rec.height >= 1 and rec.distinct_first_one == 2
        hits += 1
    assert hits > 30


@pytest.mark.parametrize("builder", ["bulk", "insert"])
def test_trial_is_deterministic(builder):
    cfg = ExperimentConfig(BadMixture(Power(0.5), 8), (64,), 1, 11, builder=builder)
    assert run_trial(cfg, 64, 5) == run_trial(cfg, 64, 5)


def test_builders_agree():
    for spec in (Bernoulli(0.5), BadMuN(10), NuForAlpha(Power(0.5))):
        a = ExperimentConfig(spec, (100,), 4, 9)
        b = ExperimentConfig(spec, (100,), 4, 9, builder="insert")
        assert run_grid(a, workers=1)[0] == run_grid(b, workers=1)[0]


def test_substream_keys_distinct():
    keys = {string_key(1, n, t, j) for n in (1, 2) for t in range(3) for j in range(4)}
    assert len(keys) == 24


def test_trial_records_respect_height_sandwich():
    for spec in (Bernoulli(0.5), BadMuN(8), BadMixture(Power(0.5), 16)):
        records, _ = run_grid(ExperimentConfig(spec, (1, 17, 80), 5, 2), workers=1)
        for r in records:
            assert r.distinct_first_one - 1 <= r.height <= r.n - 1
            assert 0 <= r.prefix_match_count <= r.n


def test_grid_of_one():
    _, summary = run_grid(ExperimentConfig(BadMuN(3), (1,), 1, 0), workers=1)
    row = summary.row(1)
    assert row.mean_height == 0 and row.mean_ratio_h_over_log2n is None


def test_workers_do_not_change_results(monkeypatch):
    monkeypatch.delenv("PATRICIA_LAB_THREADS", raising=False)
    cfg = ExperimentConfig(BadMixture(Power(0.5), 64), (10, 40), 6, 77)
    one = run_grid(cfg, workers=1)
    two = run_grid(cfg, workers=2)
    assert one[0] == two[0]
    assert one[1] == two[1]


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("PATRICIA_LAB_THREADS", "1")
    assert worker_count(8) == 1
    monkeypatch.setenv("PATRICIA_LAB_THREADS", "3")
    assert worker_count(2) == 2
    assert worker_count(8) == 3


def test_config_validation():
    for bad in ({"n_grid": ()}, {"n_grid": (5, 2)}, {"n_grid": (0,)}, {"trials": 0},
                {"seed": -1}, {"builder": "magic"}):
        kwargs = {"spec": Bernoulli(0.5), "n_grid": (4,), "trials": 1, "seed": 0} | bad
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)


def test_empirical_tail_examples():
    assert empirical_tail([5, 5, 5], 4) == 0
    assert empirical_tail([5, 5, 5], 5) == 1
    assert empirical_tail([1, 2, 3, 4], 2.5) == 0.5
    with pytest.raises(ValueError):
        empirical_tail([], 1)


def test_tail_offsets():
    assert tail_offsets(64) == (8, 16, 32)
    assert tail_offsets(65) == (9, 18, 36)
    assert tail_offsets(1) == (1, 2, 4)


def test_mixture_prefix_and_floor():
    spec = BadMixture(Power(0.5))
    assert mixture_prefix(spec, 4096) == "0001"  # alpha = 64, beta = 4
    assert height_floor(spec, 4096) == 64
    assert mixture_prefix(Bernoulli(0.5), 10) is None
    assert height_floor(BadMuN(5), 10) is None
    # nu counts against the transformed sequence log2(alpha)
    assert height_floor(NuForAlpha(Power(0.5)), 4096) == pytest.approx(4096 / 6)


def test_mixture_prefix_count_mean():
    cfg = ExperimentConfig(BadMixture(Power(0.5)), (4096,), 40, 123)
    records, _ = run_grid(cfg, workers=1)
    xs = [r.prefix_match_count for r in records]
    mean = statistics.fmean(xs)
    se = statistics.stdev(xs) / math.sqrt(len(xs))
    assert abs(mean - 256) <= 4 * se
    # Okamoto domination for the same runs
    low = sum(1 for x in xs if x < 2 * 4096 / 64) / len(xs)
    assert low <= okamoto_bound(4096, 64) + 4 * proportion_se(low, len(xs))


def test_mu_n_distinct_count_floor():
    from patricia_lab.bounds import distinct_lower_bound

    cfg = ExperimentConfig(BadMuN(20), (20,), 100, 5)
    records, summary = run_grid(cfg, workers=1)
    ds = [r.distinct_first_one for r in records]
    se = statistics.stdev(ds) / math.sqrt(len(ds))
    assert summary.row(20).mean_distinct >= distinct_lower_bound(20, 20) - 4 * se


def test_enk_event():
    strings = sample_strings(Bernoulli(0.5), 1, 200, 0)
    assert enk_event(strings, 1, 0.1)  # one of two halves holds >= 40 strings
    assert not enk_event(strings, 8, 0.25)


def test_csv_headers_and_round_trip(tmp_path):
    cfg = ExperimentConfig(BadMuN(6), (3, 9), 4, 8)
    records, summary = run_grid(cfg, workers=1)
    tp, sp = tmp_path / "trials.csv", tmp_path / "summary.csv"
    write_trials_csv(tp, cfg, records)
    write_summary_csv(sp, summary)
    assert tp.read_text().splitlines()[0] == ",".join(TRIAL_HEADER)
    assert sp.read_text().splitlines()[0] == ",".join(SUMMARY_HEADER)
    rows = read_csv(tp)
    assert len(rows) == 8
    assert {r["dist"] for r in rows} == {"mu_n"}
    assert rows[0]["params"] == '{"N":6}'
    assert all(r["elapsed_ms"] == "" for r in rows)
    assert [int(r["height"]) for r in rows] == [r.height for r in records]
    srows = read_csv(sp)
    assert [int(r["n"]) for r in srows] == [3, 9]
    assert float(srows[0]["mean_height"]) == pytest.approx(summary.row(3).mean_height)
    assert srows[0]["h_over_floor"] == ""


def test_timing_column_only_when_requested(tmp_path):
    cfg = ExperimentConfig(Bernoulli(0.5), (4,), 2, 1, record_timing=True)
    records, _ = run_grid(cfg, workers=1)
    write_trials_csv(tmp_path / "t.csv", cfg, records)
    assert all(float(r["elapsed_ms"]) >= 0 for r in read_csv(tmp_path / "t.csv"))


def test_summary_tail_table():
    _, summary = run_grid(ExperimentConfig(BadMuN(8), (64,), 20, 3), workers=1)
    row = summary.row(64)
    assert [t for t, *_ in row.tails] == [8, 16, 32]
    for t, threshold, tail, bound in row.tails:
        assert threshold == row.mean_height - t
        assert 0 <= tail <= 1
        assert bound == pytest.approx(math.exp(-t * t / 128))
