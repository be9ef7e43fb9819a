"""Per-formula jobs for the three experiment protocols.

A job is a plain tuple so it pickles cheaply into worker processes; running
it is a pure function of (spec, job) and returns the job's result rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dataset import (Dataset, PositivesUnavailable, TooFewNegatives, build_dataset, gen_negative,
                       mislabeled_rows, write_csv)
from ..encoders import constrainedness_grid, encode_gcp, encode_kclique, random_3cnf
from ..formula import CnfFormula, evaluate_many, read_dimacs_file, write_dimacs
from ..graphs import clique_edge_probability, flat_3colorable, gnm, gnp, morph, ring_lattice
from ..learner import cross_validate, cross_validate_tree, neuron_sweep
from ..seeds import derive_seed
from .config import ExperimentSpec

log = logging.getLogger(__name__)

ROW_COLUMNS = (
    "set", "index", "seed", "formula_id", "num_vars", "num_clauses", "param", "level", "activation",
    "status", "reason", "positives", "negatives", "sampler_mode", "model_count",
    "mean_acc", "min_acc", "perfect", "min_neurons", "dt_mean_acc", "dt_min_acc",
)


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Job:
    key: str          # unique, stable; journal key
    set_key: str      # seed namespace; shared by every activation of a phase formula
    index: int
    labels: tuple[str, ...]  # result sets this job contributes one row to
    param: str
    level: str = ""


def _fmt_ratio(r: float) -> str:
    return repr(float(r))


def cop_set_key(spec: ExperimentSpec, i: int) -> tuple[str, str]:
    if spec.family == "flat3gcp":
        n, m = spec.nodes[i], spec.edges[i]
        return f"flat3gcp_n{n}_m{m}", str(n)
    if spec.family == "morphed5gcp":
        r = spec.morph_ratios[i]
        return f"morphed5gcp_r{_fmt_ratio(r)}", _fmt_ratio(r)
    n = spec.nodes[i]
    return f"clique3_n{n}", str(n)


def phase_set_key(v: int, level: int) -> str:
    return f"phase_v{v}_l{level:+d}"


def plan_jobs(spec: ExperimentSpec) -> list[Job]:
    jobs = []
    if spec.protocol == "cop":
        groups = len(spec.morph_ratios) if spec.family == "morphed5gcp" else len(spec.nodes)
        for g in range(groups):
            set_key, param = cop_set_key(spec, g)
            count = spec.formulas_per_set
            if spec.family == "morphed5gcp" and spec.morph_ratios[g] == 0.0:
                count = 1  # every r=0 morph is the lattice itself
            for i in range(count):
                jobs.append(Job(f"{set_key}#{i}", set_key, i, (set_key,), param))
    elif spec.protocol == "phase":
        for v in spec.variables:
            for level in spec.levels:
                set_key = phase_set_key(v, level)
                labels = tuple(f"{set_key}_{a}" for a in spec.activations)
                for i in range(spec.formulas_per_set):
                    jobs.append(Job(f"{set_key}#{i}", set_key, i, labels, str(v), str(level)))
    else:
        for i, path in enumerate(spec.cnf_files):
            jobs.append(Job(f"ingest#{i}", "ingest", i, ("ingest",), Path(path).name))
    return jobs


def job_seed(spec: ExperimentSpec, job: Job) -> int:
    return derive_seed(spec.master_seed, job.set_key, job.index)


def _cop_formula(spec: ExperimentSpec, job: Job, seed: int) -> CnfFormula:
    gseed, mseed = derive_seed(seed, "graph"), derive_seed(seed, "morph")
    if spec.family == "flat3gcp":
        n = int(job.param)
        m = spec.edges[spec.nodes.index(n)]
        g, _ = flat_3colorable(n, m, gseed)
        return encode_gcp(g, 3)
    if spec.family == "morphed5gcp":
        n, degree = 100, spec.lattice_degree
        g2 = ring_lattice(n, degree)
        g1 = gnm(n, g2.num_edges, gseed)
        return encode_gcp(morph(g1, g2, float(job.param), mseed), 5)
    n = int(job.param)
    return encode_kclique(gnp(n, clique_edge_probability(n, 3, spec.expected_cliques), gseed), 3)


def _base_row(job: Job, label: str, seed: int, f: CnfFormula | None, formula_id: str) -> dict:
    row = dict.fromkeys(ROW_COLUMNS)
    row.update(set=label, index=job.index, seed=seed, formula_id=formula_id, param=job.param,
               level=job.level, status="ok", reason="")
    if f is not None:
        row.update(num_vars=f.num_vars, num_clauses=f.num_clauses)
    return row


def _fill_dataset(row: dict, d: Dataset) -> None:
    p = d.provenance
    row.update(positives=int(p["positives"]), negatives=int(p["negatives"]),
               sampler_mode=p["sampler_mode"],
               model_count=int(p["model_count"]) if p["model_count"] else None)


def _dataset(spec: ExperimentSpec, f: CnfFormula, seed: int, formula_id: str):
    """(dataset, None) or (None, skip reason)."""
    try:
        d = build_dataset(f, spec.positives, spec.negatives, seed, spec.sampler_budget(), formula_id)
    except PositivesUnavailable as e:
        return None, e.reason
    except TooFewNegatives:
        return None, "too_few_negatives"
    if len(d) < spec.folds:
        return None, "too_few_rows"
    if mislabeled_rows(f, d).size:
        raise AssertionError(f"{formula_id}: dataset has mislabeled rows")
    return d, None


def dataset_paths(spec: ExperimentSpec, job: Job) -> tuple[Path, Path]:
    """Where ``save_datasets`` puts a job's formula and dataset."""
    stem = Path(spec.output_dir) / "datasets" / job.key.replace("#", "_")
    return stem.with_suffix(".cnf"), stem.with_suffix(".csv")


def _save(spec: ExperimentSpec, job: Job, f: CnfFormula, d: Dataset) -> None:
    if spec.save_datasets:
        cnf, data = dataset_paths(spec, job)
        cnf.parent.mkdir(parents=True, exist_ok=True)
        cnf.write_text(write_dimacs(f))
        data.write_text(write_csv(d))


def _skip(rows: list[dict], reason: str) -> list[dict]:
    for r in rows:
        r.update(status="skipped", reason=reason)
    return rows


def run_job(spec: ExperimentSpec, job: Job) -> list[dict]:
    seed = job_seed(spec, job)
    if spec.protocol == "ingest":
        return _run_ingest(spec, job, seed)
    if spec.protocol == "cop":
        f = _cop_formula(spec, job, seed)
    else:
        v, level = int(job.param), int(job.level)
        count = next(l.clause_count for l in constrainedness_grid(v) if l.offset_index == level)
        f = random_3cnf(v, count, derive_seed(seed, "formula"))
    rows = [_base_row(job, label, seed, f, job.key) for label in job.labels]
    if spec.protocol == "phase":
        for row, act in zip(rows, spec.activations):
            row["activation"] = act
    d, reason = _dataset(spec, f, seed, job.key)
    if d is None:
        return _skip(rows, reason)
    _save(spec, job, f, d)
    for row in rows:
        _fill_dataset(row, d)
    if spec.protocol == "cop":
        rep = cross_validate(d, spec.mlp_config(seed=derive_seed(seed, "mlp")), spec.folds)
        rows[0].update(mean_acc=rep.mean_accuracy, min_acc=rep.min_accuracy, perfect=rep.perfect)
        return rows
    base = spec.mlp_config(seed=derive_seed(seed, "mlp"))
    for row, act in zip(rows, spec.activations):
        sweep = neuron_sweep(d, act, base, k=spec.folds)
        rep = sweep.final_report
        row.update(mean_acc=rep.mean_accuracy, min_acc=rep.min_accuracy,
                   perfect=sweep.learned, min_neurons=sweep.min_neurons)
    return rows


def read_sample_file(path: str | Path, f: CnfFormula) -> np.ndarray:
    """Satisfying assignments from an external file, each re-validated against ``f``.

    Accepts either a bit CSV (header ``x1,...,xn`` with an optional ``y``
    column that must be 1) or one model per line as signed DIMACS literals,
    optionally prefixed by ``v`` and terminated by ``0``. Blank lines and
    lines starting with ``c`` or ``#`` are ignored.
    """
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as e:
        raise IngestError(f"cannot read sample file {p}: {e.strerror}") from None
    rows: list[np.ndarray] = []
    where: list[int] = []
    bit_csv = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line[0] in "c#":
            continue
        if bit_csv is None:
            bit_csv = line.startswith("x1")
            if bit_csv:
                header = [h.strip() for h in line.split(",")]
                has_y = header[-1] == "y"
                if len(header) - has_y != f.num_vars:
                    raise IngestError(f"{p} line {lineno}: header has {len(header) - has_y} "
                                      f"variables, formula has {f.num_vars}")
                continue
        if bit_csv:
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(header) or any(c not in ("0", "1") for c in cells):
                raise IngestError(f"{p} line {lineno}: malformed row")
            if has_y and cells[-1] != "1":
                raise IngestError(f"{p} line {lineno}: row is labelled negative")
            rows.append(np.array(cells[: f.num_vars], dtype=np.uint8))
        else:
            toks = line.split()
            if toks[0] == "v":
                toks = toks[1:]
            elif toks[0].startswith("v"):
                toks[0] = toks[0][1:]
            try:
                lits = [int(t) for t in toks]
            except ValueError:
                raise IngestError(f"{p} line {lineno}: malformed literal") from None
            if lits and lits[-1] == 0:
                lits = lits[:-1]
            bits = np.zeros(f.num_vars, dtype=np.uint8)
            seen = set()
            for lit in lits:
                if lit == 0 or abs(lit) > f.num_vars or abs(lit) in seen:
                    raise IngestError(f"{p} line {lineno}: bad literal {lit}")
                seen.add(abs(lit))
                bits[abs(lit) - 1] = lit > 0
            if len(seen) != f.num_vars:
                raise IngestError(f"{p} line {lineno}: assigns {len(seen)} of {f.num_vars} variables")
            rows.append(bits)
        where.append(lineno)
    if not rows:
        raise IngestError(f"{p}: no samples")
    X = np.stack(rows)
    bad = np.flatnonzero(~evaluate_many(f, X))
    if bad.size:
        raise IngestError(f"{p} line {where[bad[0]]}: sample does not satisfy the formula")
    return X


def _run_ingest(spec: ExperimentSpec, job: Job, seed: int) -> list[dict]:
    path = spec.cnf_files[job.index]
    if not Path(path).is_file():
        raise IngestError(f"cnf file not found: {path}")
    f = read_dimacs_file(path)
    row = _base_row(job, "ingest", seed, f, Path(path).name)
    samples = spec.sample_files[job.index] if spec.sample_files else ""
    if samples not in ("", "-"):
        pos = read_sample_file(samples, f)
        rng = np.random.default_rng(derive_seed(seed, "external"))
        if len(pos) > spec.positives:
            pos = pos[np.sort(rng.choice(len(pos), spec.positives, replace=False))]
        try:
            neg = gen_negative(f, spec.negatives, derive_seed(seed, "negative"))
        except TooFewNegatives:
            return _skip([row], "too_few_negatives")
        X = np.concatenate([pos, neg])
        y = np.concatenate([np.ones(len(pos), np.uint8), np.zeros(len(neg), np.uint8)])
        perm = np.random.default_rng(derive_seed(seed, "shuffle")).permutation(len(y))
        d = Dataset(f.num_vars, X[perm], y[perm], {
            "positives": str(len(pos)), "negatives": str(len(neg)),
            "sampler_mode": "external", "model_count": ""})
        if mislabeled_rows(f, d).size:
            raise AssertionError(f"{path}: dataset has mislabeled rows")
    else:
        d, reason = _dataset(spec, f, seed, row["formula_id"])
        if d is None:
            return _skip([row], reason)
    _save(spec, job, f, d)
    _fill_dataset(row, d)
    rep = cross_validate(d, spec.mlp_config(seed=derive_seed(seed, "mlp")), spec.folds)
    tree = cross_validate_tree(d, spec.folds)
    row.update(mean_acc=rep.mean_accuracy, min_acc=rep.min_accuracy, perfect=rep.perfect,
               dt_mean_acc=tree.mean_accuracy, dt_min_acc=tree.min_accuracy)
    return [row]
