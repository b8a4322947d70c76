import json
import subprocess
import sys

import pytest

from patricia_lab.cli import run_cli
from patricia_lab.experiments import SUMMARY_HEADER, TRIAL_HEADER


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_writes_both_csvs(tmp_path, capsys):
    out = tmp_path / "out"
    code, text, _ = run(capsys, "simulate", "--dist", '{"law":"mu_n","N":1000}',
                        "--n", "10,20", "--trials", "3", "--seed", "42", "--out", str(out),
                        "--workers", "1")
    assert code == 0
    assert (out / "trials.csv").read_text().splitlines()[0] == ",".join(TRIAL_HEADER)
    assert (out / "summary.csv").read_text().splitlines()[0] == ",".join(SUMMARY_HEADER)
    assert len((out / "trials.csv").read_text().splitlines()) == 7
    assert "wrote" in text


def test_simulate_config_file_with_override(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"dist": {"law": "bernoulli", "p": 0.5}, "n": [8, 16],
                                "trials": 2, "seed": 1, "out": str(tmp_path / "a")}))
    code, _, _ = run(capsys, "simulate", "--config", str(conf), "--out", str(tmp_path / "b"),
                     "--no-per-trial", "--quiet")
    assert code == 0
    assert (tmp_path / "b" / "summary.csv").exists()
    assert not (tmp_path / "b" / "trials.csv").exists()
    assert not (tmp_path / "a").exists()


def test_simulate_requires_seed(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--dist", '{"law":"bernoulli","p":0.5}',
                       "--n", "4", "--trials", "1", "--out", str(tmp_path))
    assert code == 2 and "--seed" in err


def test_simulate_is_byte_reproducible(tmp_path, capsys):
    outs = []
    for i, workers in enumerate(("1", "2")):
        d = tmp_path / str(i)
        run(capsys, "simulate", "--dist", '{"law":"mixture","alpha":{"family":"power","eps":0.5}}',
            "--n", "16,32", "--trials", "4", "--seed", "5", "--out", str(d), "--workers", workers)
        outs.append(((d / "trials.csv").read_bytes(), (d / "summary.csv").read_bytes()))
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv, expected", [
    (("bounds", "devroye", "--n", "64", "--t", "16"), 0.1353352832),
    (("bounds", "chernoff", "--n", "100", "--k", "3", "--eps", "0.1"), 0.05390),
    (("bounds", "okamoto", "--n", "4096", "--alpha", "64"), 1.27e-14),
    (("bounds", "distinct", "--n", "50", "--N", "100"), 49.875),
    (("bounds", "thm2", "--n", "4096", "--alpha", "64"), 64.0),
])
def test_bounds(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert float(out) == pytest.approx(expected, rel=1e-3)


def test_prefix_prob(capsys):
    code, out, _ = run(capsys, "prefix-prob", "--dist", '{"law":"mu_n","N":2}', "--prefix", "00")
    assert code == 0 and float(out) == 0.5


def test_prefix_prob_with_monte_carlo(capsys):
    code, out, _ = run(capsys, "prefix-prob", "--dist", '{"law":"bernoulli","p":0.5}',
                       "--prefix", "1", "--samples", "2000", "--seed", "3")
    assert code == 0
    lines = out.splitlines()
    assert float(lines[0]) == 0.5 and lines[1].startswith("monte carlo:")


@pytest.mark.parametrize("argv", [
    (),
    ("frobnicate",),
    ("bounds", "devroye", "--n", "64"),
    ("bounds", "devroye", "--n", "0", "--t", "1"),
    ("bounds", "nope", "--n", "1"),
    ("simulate", "--bogus"),
    ("prefix-prob", "--dist", "{not json", "--prefix", "0"),
    ("prefix-prob", "--dist", '{"law":"mu_n","N":2}', "--prefix", "012"),
    ("prefix-prob", "--dist", '{"law":"mu_n","N":2}', "--prefix", "0", "--samples", "5"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_io_error_exits_1(tmp_path, capsys):
    code, _, err = run(capsys, "plot", "--csv", str(tmp_path / "missing.csv"),
                       "--out", str(tmp_path / "x.svg"))
    assert code == 1 and "missing.csv" in err


def test_plot_consumes_simulate_output(tmp_path, capsys):
    out = tmp_path / "sim"
    run(capsys, "simulate", "--dist", '{"law":"mu_n","N":50}', "--n", "5,10,20",
        "--trials", "2", "--seed", "1", "--out", str(out), "--workers", "1")
    svg1, svg2 = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(capsys, "plot", "--csv", str(out / "summary.csv"), "--out", str(svg1))[0] == 0
    assert run(capsys, "plot", "--csv", str(out / "summary.csv"), "--out", str(svg2))[0] == 0
    body = svg1.read_text()
    assert body.startswith("<svg") and "<polyline" in body and "h_over_n" in body
    assert svg1.read_bytes() == svg2.read_bytes()
    code, _, _ = run(capsys, "plot", "--csv", str(out / "summary.csv"), "--x", "n",
                     "--y", "mean_height", "--out", str(svg2))
    assert code == 0


def test_plot_rejects_bad_input(tmp_path, capsys):
    one_row = tmp_path / "one.csv"
    one_row.write_text("n,h_over_n\n1,0\n")
    assert run(capsys, "plot", "--csv", str(one_row), "--out", str(tmp_path / "o.svg"))[0] == 2
    two_rows = tmp_path / "two.csv"
    two_rows.write_text("n,h_over_n\n1,0\n2,x\n")
    assert run(capsys, "plot", "--csv", str(two_rows), "--out", str(tmp_path / "o.svg"))[0] == 2
    assert run(capsys, "plot", "--csv", str(two_rows), "--y", "nope",
               "--out", str(tmp_path / "o.svg"))[0] == 2


def test_verify_single_criterion(capsys):
    code, out, _ = run(capsys, "verify", "--only", "3")
    assert code == 0
    assert "[PASS]" in out and "1/1 criteria passed" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "patricia_lab", "bounds", "devroye",
                           "--n", "2", "--t", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert float(proc.stdout) == pytest.approx(0.3678794412)
