import argparse
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from boolearn import cli
from boolearn.formula import parse_dimacs
from boolearn.harness import JOURNAL


def run(capsys, *argv):
    code = cli.dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def subparsers():
    parser = cli.build_parser()
    (action,) = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    return action.choices


def test_every_subcommand_exists():
    assert set(subparsers()) == {"gen", "sample", "train", "sweep", "experiment", "report"}


@pytest.mark.parametrize("name", ["gen", "sample", "train", "sweep", "experiment", "report"])
def test_help_lists_every_flag(name, capsys):
    code, out, _ = run(capsys, name, "--help")
    assert code == 0
    for action in subparsers()[name]._actions:
        for opt in action.option_strings:
            assert opt in out, f"{name} --help omits {opt}"


def test_gen_phase_example(capsys):
    code, out, err = run(capsys, "gen", "--family", "random3cnf", "--vars", "20", "--level", "0", "--seed", "7")
    assert code == 0
    f = parse_dimacs(out)
    assert (f.num_vars, f.num_clauses) == (20, 91)
    assert "seed=7" in err


@pytest.mark.parametrize("argv,nv", [
    (["--family", "flat3gcp", "--nodes", "30", "--edges", "60"], 90),
    (["--family", "flat3gcp", "--nodes", "30", "--edges", "60", "--copies", "2"], 180),
    (["--family", "morphed5gcp", "--ratio", "0.5"], 500),
    (["--family", "clique3", "--nodes", "50"], 150),
])
def test_gen_families(argv, nv, capsys):
    code, out, _ = run(capsys, "gen", *argv, "--seed", "1")
    assert code == 0 and parse_dimacs(out).num_vars == nv


def test_gen_is_reproducible(capsys):
    a = run(capsys, "gen", "--family", "random3cnf", "--vars", "12", "--clauses", "30", "--seed", "5")[1]
    b = run(capsys, "gen", "--family", "random3cnf", "--vars", "12", "--clauses", "30", "--seed", "5")[1]
    assert a == b


@pytest.mark.parametrize("argv", [
    ["gen", "--family", "random3cnf", "--vars", "20"],
    ["gen", "--family", "random3cnf", "--vars", "20", "--level", "0", "--clauses", "3"],
    ["gen", "--family", "random3cnf", "--vars", "20", "--level", "9"],
    ["gen", "--family", "flat3gcp", "--nodes", "30"],
    ["gen", "--family", "nope"],
    ["gen", "--family", "random3cnf", "--vars", "20", "--level", "0", "--bogus"],
    ["train"],
    ["frobnicate"],
    [],
    ["sample", "--cnf", "/nonexistent/f.cnf"],
    ["train", "--data", "/nonexistent/d.csv"],
    ["report", "--dir", "/nonexistent/dir"],
    ["experiment", "--config", "/nonexistent/x.ini"],
])
def test_user_errors_exit_1(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


def test_internal_error_exit_2(monkeypatch, capsys):
    def boom(a):
        raise RuntimeError("bug")
    monkeypatch.setitem(cli.COMMANDS, "gen", boom)
    code, _, _ = run(capsys, "gen", "--family", "random3cnf", "--vars", "5", "--level", "0")
    assert code == 2


def test_pipeline_gen_sample_train_sweep(tmp_path, capsys):
    cnf, data = tmp_path / "f.cnf", tmp_path / "d.csv"
    assert run(capsys, "gen", "--family", "flat3gcp", "--nodes", "9", "--edges", "12", "--seed", "2",
               "--out", str(cnf))[0] == 0
    code, _, err = run(capsys, "sample", "--cnf", str(cnf), "--pos", "60", "--neg", "60", "--seed", "3",
                       "--out", str(data))
    assert code == 0 and "seed=3" in err
    code, out, err = run(capsys, "train", "--data", str(data), "--hidden", "8,4", "--epochs", "5")
    assert code == 0 and "seed=0" in err
    header, line = out.strip().splitlines()
    assert header == "fold1,fold2,fold3,fold4,fold5,mean_acc,min_acc,perfect"
    assert len(line.split(",")) == 8
    code, out, _ = run(capsys, "train", "--data", str(data), "--model", "tree")
    assert code == 0 and out.startswith("fold1")
    code, out, _ = run(capsys, "sweep", "--data", str(data), "--epochs", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("neurons,fold1") and lines[-1].startswith("min_neurons,")
    assert run(capsys, "train", "--data", str(data), "--hidden", "0")[0] == 1
    assert run(capsys, "train", "--data", str(data), "--folds", "1")[0] == 1


def test_sample_unsat_is_user_error(tmp_path, capsys):
    p = tmp_path / "u.cnf"
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    code, _, err = run(capsys, "sample", "--cnf", str(p))
    assert code == 1 and "unsat" in err


CONFIG = """
[experiment]
protocol = phase
master_seed = 11
formulas_per_set = 2
positives = 40
negatives = 40
output = out

[phase]
variables = 10
levels = -5, -4, 0

[mlp]
epochs = 4
"""


def test_experiment_twice_identical_and_report(tmp_path, capsys):
    cfg = tmp_path / "phase.ini"
    cfg.write_text(CONFIG)
    code, _, err = run(capsys, "experiment", "--config", str(cfg), "--workers", "1", "--out", str(tmp_path / "a"))
    assert code == 0 and "master_seed=11" in err
    assert run(capsys, "experiment", "--config", str(cfg), "--workers", "1", "--out", str(tmp_path / "b"))[0] == 0
    for name in ("rows.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert run(capsys, "report", "--dir", str(tmp_path / "a"), "--out", str(tmp_path / "r"))[0] == 0
    for name in ("rows.csv", "summary.csv", "fig_percent_learned.csv", "fig_avg_neurons.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "r" / name).read_bytes()
    # config output path resolves next to the config file
    assert run(capsys, "experiment", "--config", str(cfg), "--workers", "1")[0] == 0
    assert (tmp_path / "out" / "summary.csv").read_bytes() == (tmp_path / "a" / "summary.csv").read_bytes()


def test_kill_and_resume(tmp_path):
    cfg = tmp_path / "phase.ini"
    cfg.write_text(CONFIG.replace("levels = -5, -4, 0", "levels = -5, -4, -3, -2"))
    env = dict(os.environ, PYTHONPATH=str(Path(cli.__file__).parents[1]))
    argv = [sys.executable, "-m", "boolearn.cli", "experiment", "--config", str(cfg), "--workers", "1"]
    ref = subprocess.run(argv + ["--out", str(tmp_path / "ref")], env=env, capture_output=True)
    assert ref.returncode == 0, ref.stderr
    journal = tmp_path / "out" / JOURNAL
    proc = subprocess.Popen(argv, env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    deadline = time.time() + 120
    while time.time() < deadline:
        if journal.exists() and journal.read_bytes().count(b"\n") >= 3:
            break
        time.sleep(0.05)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    assert not (tmp_path / "out" / "summary.csv").exists()
    again = subprocess.run(argv, env=env, capture_output=True)
    assert again.returncode == 0, again.stderr
    assert (tmp_path / "out" / "summary.csv").read_bytes() == (tmp_path / "ref" / "summary.csv").read_bytes()
    assert (tmp_path / "out" / "rows.csv").read_bytes() == (tmp_path / "ref" / "rows.csv").read_bytes()
