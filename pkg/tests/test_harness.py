import csv
import json
from pathlib import Path
from statistics import fmean

import numpy as np
import pytest

from boolearn.encoders import encode_gcp
from boolearn.formula import write_dimacs
from boolearn.graphs import flat_3colorable
from boolearn.harness import (JOURNAL, ConfigError, ExperimentSpec, IngestError, JournalMismatch,
                              job_seed, journal_rows, load_config, parse_config, plan_jobs, read_sample_file,
                              run_and_report, run_experiment, run_ingest_experiment, run_job, summarize,
                              write_report)
from boolearn.harness.report import figure_series, load_rows_csv
from boolearn.seeds import derive_seed
from boolearn.solver import enumerate_models

FAST = {"hidden_layers": (8,), "epochs": 5}


def phase_spec(tmp_path, **kw):
    base = dict(protocol="phase", output_dir=str(tmp_path / "out"), master_seed=3, formulas_per_set=2,
                positives=40, negatives=40, variables=(10,), levels=(-5, -4, 0), workers=1,
                mlp={"epochs": 5})
    base.update(kw)
    return ExperimentSpec(**base)


def test_parse_config_full(tmp_path):
    spec = parse_config("""
[experiment]
protocol = cop
master_seed = 9
formulas_per_set = 3
output = res   # comment
[cop]
family = morphed5gcp
morph_ratios = 1, 0.5, 2^-4, 0
[mlp]
hidden_layers = 16, 8
epochs = 7
[sampler]
max_decisions = 5000
""", base_dir=tmp_path)
    assert spec.protocol == "cop" and spec.master_seed == 9 and spec.formulas_per_set == 3
    assert spec.morph_ratios == (1.0, 0.5, 0.0625, 0.0)
    assert spec.output_dir == str(tmp_path / "res")
    assert spec.mlp_config().hidden_layers == (16, 8) and spec.mlp_config().epochs == 7
    assert spec.sampler_budget().max_decisions == 5000


def test_desk_scale_defaults():
    assert ExperimentSpec("phase").formulas_per_set == 20
    assert ExperimentSpec("cop", nodes=(30,), edges=(60,)).formulas_per_set == 10


@pytest.mark.parametrize("text", [
    "[experiment]\nprotocol = nope\n",
    "[experiment]\nmaster_seed = 1\n",
    "[experiment]\nprotocol = phase\nbogus = 1\n",
    "[experiment]\nprotocol = phase\n[extra]\na = 1\n",
    "[experiment]\nprotocol = phase\nformulas_per_set = x\n",
    "[experiment]\nprotocol = phase\n[phase]\nlevels = 6\n",
    "[experiment]\nprotocol = cop\n[cop]\nfamily = flat3gcp\nnodes = 30\n",
    "[experiment]\nprotocol = phase\n[mlp]\nlearning_rate = 0\n",
    "[experiment]\nprotocol = phase\n[sampler]\ncell_target = 0\n",
    "[experiment]\nprotocol = ingest\n",
    "no section header\n",
])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="nope.ini"):
        load_config(tmp_path / "nope.ini")


def test_full_phase_grid_shape():
    spec = ExperimentSpec("phase", variables=tuple(range(10, 101, 10)), activations=("relu", "logistic"),
                          formulas_per_set=1)
    jobs = plan_jobs(spec)
    assert len(jobs) == 10 * 11
    assert len({lab for j in jobs for lab in j.labels}) == 10 * 11 * 2


def test_morph_zero_has_single_formula():
    spec = ExperimentSpec("cop", family="morphed5gcp", morph_ratios=(0.5, 0.0), formulas_per_set=4)
    counts = {}
    for j in plan_jobs(spec):
        counts[j.set_key] = counts.get(j.set_key, 0) + 1
    assert counts == {"morphed5gcp_r0.5": 4, "morphed5gcp_r0.0": 1}


def test_seed_derivation_is_stable(tmp_path):
    spec = phase_spec(tmp_path)
    job = plan_jobs(spec)[1]
    assert job_seed(spec, job) == derive_seed(3, "phase_v10_l-5", 1)
    assert run_job(spec, job) == run_job(spec, job)  # reproducible in isolation


def test_cop_flat_sizes(tmp_path):
    spec = ExperimentSpec("cop", family="flat3gcp", nodes=(30,), edges=(60,), formulas_per_set=2,
                          positives=30, negatives=30, output_dir=str(tmp_path), mlp=FAST, workers=1)
    rows = run_experiment(spec)
    assert [(r["num_vars"], r["num_clauses"]) for r in rows] == [(90, 300)] * 2
    assert all(r["status"] == "ok" for r in rows)


def test_cop_clique_and_morph_run(tmp_path):
    clique = ExperimentSpec("cop", family="clique3", nodes=(12,), expected_cliques=5, formulas_per_set=2,
                            positives=20, negatives=20, output_dir=str(tmp_path / "c"), mlp=FAST, workers=1)
    rows = run_experiment(clique)
    assert all(r["num_vars"] == 36 for r in rows)
    for r in rows:
        assert r["status"] == "ok" or r["reason"] == "unsat"


def test_empty_set_summary():
    rows = [dict(set="s", status="skipped", reason="unsat", mean_acc=None, min_acc=None, perfect=None,
                 min_neurons=None, param="10", level="0", activation="relu")] * 3
    (s,) = summarize(rows)
    assert s.empty and s.attempted == 3 and s.sampled == 0
    assert s.percent_perfect is None and s.skip_reasons == {"unsat": 3}


def test_summary_excludes_skipped_and_uses_learned_neurons():
    def row(status, acc=None, perfect=None, neurons=None):
        return dict(set="s", status=status, reason="" if status == "ok" else "unsat", mean_acc=acc,
                    min_acc=acc, perfect=perfect, min_neurons=neurons, param="20", level="1",
                    activation="relu")
    rows = [row("ok", 1.0, True, 16), row("ok", 0.9, False), row("ok", 1.0, True, 64), row("skipped")]
    (s,) = summarize(rows)
    assert (s.attempted, s.sampled) == (4, 3)
    assert s.percent_perfect == pytest.approx(200 / 3)
    assert s.avg_min_neurons == 40
    assert s.min_accuracy == 0.9 and s.mean_accuracy == pytest.approx(2.9 / 3)


@pytest.fixture(scope="module")
def phase_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("phase")
    spec = phase_spec(tmp, activations=("relu", "logistic"))
    summaries = run_and_report(spec)
    return spec, summaries


def test_report_files(phase_run):
    spec, _ = phase_run
    for name in ("rows.csv", "summary.csv", "fig_percent_learned.csv", "fig_avg_neurons.csv",
                 "fig_percent_learned.svg", "fig_avg_neurons.svg", JOURNAL):
        assert (Path(spec.output_dir) / name).exists(), name
    svg = (Path(spec.output_dir) / "fig_percent_learned.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_summary_header_exact(phase_run):
    spec, _ = phase_run
    with open(f"{spec.output_dir}/summary.csv") as fh:
        assert fh.readline() == "set,attempted,sampled,mean_acc,min_acc,pct_perfect,avg_min_neurons\n"


def test_aggregates_recomputed_from_rows(phase_run):
    spec, summaries = phase_run
    rows = load_rows_csv(f"{spec.output_dir}/rows.csv")
    by_set = {}
    for r in rows:
        by_set.setdefault(r["set"], []).append(r)
    with open(f"{spec.output_dir}/summary.csv") as fh:
        table = {rec["set"]: rec for rec in csv.DictReader(fh)}
    for label, rs in by_set.items():
        ok = [r for r in rs if r["status"] == "ok"]
        rec = table[label]
        assert int(rec["attempted"]) == len(rs) and int(rec["sampled"]) == len(ok)
        if ok:
            learned = sum(r["min_neurons"] is not None for r in ok)
            assert float(rec["pct_perfect"]) == pytest.approx(100 * learned / len(ok), abs=1e-6)
            assert float(rec["mean_acc"]) == pytest.approx(fmean(r["mean_acc"] for r in ok), abs=1e-6)
        else:
            assert rec["pct_perfect"] == ""


def test_figure_shape_and_groups(phase_run):
    spec, summaries = phase_run
    with open(f"{spec.output_dir}/fig_percent_learned.csv") as fh:
        pts = list(csv.DictReader(fh))
    series = {}
    for p in pts:
        series.setdefault(p["series"], []).append(p)
    assert [p["x"] for p in series["v10_relu"]] == [str(x) for x in range(-5, 6)]
    assert [p["x"] for p in series["v10_logistic"]] == [str(x) for x in range(-5, 6)]
    ind = {int(p["x"]): float(p["y"]) for p in series["v10_relu"] if p["y"]}
    under = [ind[l] for l in range(-5, 0) if l in ind]
    (u,) = series["under_relu"]
    assert float(u["y"]) == pytest.approx(fmean(under), abs=1e-6) if under else u["y"] == ""


def test_grouped_series_mean_of_levels():
    from boolearn.harness.report import SetSummary
    ss = [SetSummary(f"l{l}", 1, 1, 1.0, 1.0, float(10 * (l + 5)), None, {}, "20", str(l), "relu")
          for l in range(-5, 6)]
    figs = figure_series(ss)["fig_percent_learned"]
    grouped = {s: y for s, x, y in figs if not s.startswith("v")}
    assert grouped["under_relu"] == fmean(10 * (l + 5) for l in range(-5, 0))
    assert grouped["onphase_relu"] == 50.0
    assert grouped["over_relu"] == fmean(10 * (l + 5) for l in range(1, 6))


def test_report_byte_stable(phase_run, tmp_path):
    spec, _ = phase_run
    rows = journal_rows(spec.output_dir)
    write_report(rows, None, tmp_path / "a")
    write_report(rows, None, tmp_path / "b")
    for name in ("rows.csv", "summary.csv", "fig_percent_learned.csv", "fig_avg_neurons.svg"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        assert a == open(f"{spec.output_dir}/{name}", "rb").read()


def _files(out):
    return {n: open(f"{out}/{n}", "rb").read() for n in ("rows.csv", "summary.csv", "fig_avg_neurons.csv")}


def test_resume_after_torn_journal(tmp_path):
    spec = phase_spec(tmp_path)
    run_and_report(spec)
    full = _files(spec.output_dir)
    jpath = tmp_path / "out" / JOURNAL
    lines = jpath.read_bytes().split(b"\n")
    # keep the header and two jobs, then a half-written record
    jpath.write_bytes(b"\n".join(lines[:3]) + b"\n" + lines[3][: len(lines[3]) // 2])
    run_and_report(spec)
    assert _files(spec.output_dir) == full
    recs = [json.loads(l) for l in jpath.read_bytes().splitlines()]
    assert len(recs) == 1 + len(plan_jobs(spec))


def test_journal_rejects_other_spec(tmp_path):
    run_experiment(phase_spec(tmp_path, levels=(-5,), formulas_per_set=1))
    with pytest.raises(JournalMismatch):
        run_experiment(phase_spec(tmp_path, levels=(-5,), formulas_per_set=1, master_seed=4))


def test_workers_do_not_change_rows(tmp_path):
    a = run_experiment(phase_spec(tmp_path / "a", levels=(-5, -4)), workers=1)
    b = run_experiment(phase_spec(tmp_path / "b", levels=(-5, -4)), workers=2)
    assert a == b


@pytest.fixture
def small_cnf(tmp_path):
    g, _ = flat_3colorable(6, 6, 1)
    f = encode_gcp(g, 3)
    p = tmp_path / "small.cnf"
    p.write_text(write_dimacs(f))
    return f, p


def test_read_sample_literal_and_csv(small_cnf, tmp_path):
    f, _ = small_cnf
    models = enumerate_models(f, 5)
    lit = tmp_path / "s.txt"
    lit.write_text("c unigen style\n" + "".join(
        "v " + " ".join(str(i + 1 if b else -(i + 1)) for i, b in enumerate(m)) + " 0\n" for m in models))
    assert np.array_equal(read_sample_file(lit, f), np.array(models))
    bits = tmp_path / "s.csv"
    bits.write_text(",".join(f"x{i + 1}" for i in range(f.num_vars)) + ",y\n"
                    + "".join(",".join(map(str, m)) + ",1\n" for m in models))
    assert np.array_equal(read_sample_file(bits, f), np.array(models))


def test_read_sample_rejects_bad_row(small_cnf, tmp_path):
    f, _ = small_cnf
    good = enumerate_models(f, 1)[0]
    bad = np.zeros(f.num_vars, dtype=np.uint8)
    p = tmp_path / "s.txt"
    p.write_text("".join(" ".join(str(i + 1 if b else -(i + 1)) for i, b in enumerate(m)) + " 0\n"
                         for m in (good, bad)))
    with pytest.raises(IngestError, match="line 2"):
        read_sample_file(p, f)
    p.write_text("1 2 0\n")
    with pytest.raises(IngestError, match="assigns 2"):
        read_sample_file(p, f)


def test_ingest_with_external_and_internal_samples(small_cnf, tmp_path):
    f, cnf = small_cnf
    models = enumerate_models(f, 1000)
    ext = tmp_path / "ext.txt"
    ext.write_text("".join(" ".join(str(i + 1 if b else -(i + 1)) for i, b in enumerate(m)) + " 0\n"
                           for m in models))
    spec = ExperimentSpec("ingest", cnf_files=(str(cnf), str(cnf)), sample_files=(str(ext), "-"),
                          positives=30, negatives=30, output_dir=str(tmp_path / "out"), mlp=FAST, workers=1)
    rows = run_ingest_experiment(spec)
    assert [r["sampler_mode"] for r in rows] == ["external", "uniform"]
    assert rows[0]["positives"] == min(30, len(models))
    for r in rows:
        assert r["mean_acc"] is not None and r["dt_mean_acc"] is not None


def test_ingest_missing_file_names_path(tmp_path):
    missing = str(tmp_path / "gone.cnf")
    spec = ExperimentSpec("ingest", cnf_files=(missing,), output_dir=str(tmp_path / "o"), workers=1)
    with pytest.raises(IngestError, match="gone.cnf"):
        run_experiment(spec)


def test_ingest_unsat_skips(tmp_path):
    p = tmp_path / "u.cnf"
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    spec = ExperimentSpec("ingest", cnf_files=(str(p),), output_dir=str(tmp_path / "o"), workers=1)
    (row,) = run_experiment(spec)
    assert row["status"] == "skipped" and row["reason"] == "unsat"


@pytest.mark.parametrize("path", sorted((Path(__file__).parents[1] / "configs").glob("*.ini")))
def test_shipped_configs_parse(path):
    spec = load_config(path)
    assert plan_jobs(spec)
