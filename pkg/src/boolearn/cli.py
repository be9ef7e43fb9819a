"""Command-line entry point: boolearn {gen,sample,train,sweep,experiment,report}.

Exit codes: 0 success, 1 user error (bad flags, unreadable or malformed
input), 2 internal error. Resolved seeds are printed to stderr so every run
can be repeated from its own output.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .dataset import DatasetFormatError, PositivesUnavailable, TooFewNegatives, build_dataset, read_csv, write_csv
from .encoders import constrainedness_grid, encode_gcp, encode_kclique, random_3cnf
from .formula import DimacsError, FormulaError, read_dimacs_file, write_dimacs
from .graphs import (GraphError, clique_edge_probability, disjoint_union, flat_3colorable, gnm, gnp, morph,
                     ring_lattice)
from .harness import (ConfigError, IngestError, JournalMismatch, journal_rows, load_config, run_and_report,
                      summarize, write_report)
from .learner import MlpConfig, cross_validate, cross_validate_tree, neuron_sweep
from .seeds import derive_seed
from .solver import SamplerBudget

log = logging.getLogger("boolearn")

FAMILIES = ("random3cnf", "flat3gcp", "morphed5gcp", "clique3")


class UsageError(Exception):
    """Bad flags or flag combinations; reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


USER_ERRORS = (UsageError, ConfigError, DimacsError, FormulaError, DatasetFormatError, GraphError, IngestError,
               JournalMismatch, PositivesUnavailable, TooFewNegatives, OSError)


def _ints(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return vals


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _seed_note(**seeds) -> None:
    print(" ".join(f"{k}={v}" for k, v in seeds.items()), file=sys.stderr)


def _mlp_flags(p: argparse.ArgumentParser, hidden: bool = True) -> None:
    if hidden:
        p.add_argument("--hidden", type=_ints, default=(200, 100), help="hidden layer widths, e.g. 200,100")
    p.add_argument("--activation", choices=("relu", "logistic"), default="relu", help="hidden activation")
    p.add_argument("--epochs", type=int, default=200, help="training epochs (default 200)")
    p.add_argument("--lr", type=float, default=1e-3, help="Adam learning rate (default 1e-3)")
    p.add_argument("--l2", type=float, default=1e-4, help="L2 penalty on weights (default 1e-4)")
    p.add_argument("--batch-size", type=int, default=200, help="mini-batch size (default 200)")
    p.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    p.add_argument("--seed", type=int, default=0, help="training seed (default 0)")


def _mlp_config(a, **extra) -> MlpConfig:
    kw = dict(activation=a.activation, epochs=a.epochs, learning_rate=a.lr, l2=a.l2, batch_size=a.batch_size,
              seed=a.seed)
    if hasattr(a, "hidden"):
        kw["hidden_layers"] = a.hidden
    kw.update(extra)
    try:
        return MlpConfig(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boolearn", description="Build datasets from CNF formulas and measure how well networks learn them.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="emit a DIMACS formula", description="Emit a DIMACS formula for a family.")
    g.add_argument("--family", choices=FAMILIES, required=True, help="formula family")
    g.add_argument("--vars", type=int, help="random3cnf: variable count")
    g.add_argument("--level", type=int, help="random3cnf: constrainedness level -5..5")
    g.add_argument("--clauses", type=int, help="random3cnf: explicit clause count instead of --level")
    g.add_argument("--nodes", type=int, help="flat3gcp, clique3: vertex count (morphed5gcp: default 100)")
    g.add_argument("--edges", type=int, help="flat3gcp: edge count")
    g.add_argument("--copies", type=int, default=1, help="flat3gcp: disjoint copies side by side (default 1)")
    g.add_argument("--ratio", type=float, help="morphed5gcp: morph ratio r in [0,1]")
    g.add_argument("--degree", type=int, default=8, help="morphed5gcp: ring lattice degree (default 8)")
    g.add_argument("--expected-cliques", type=float, default=500.0,
                   help="clique3: expected 3-clique count fixing the edge probability (default 500)")
    g.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    g.add_argument("--out", help="output file (default stdout)")

    s = sub.add_parser("sample", help="build a labelled dataset CSV from a DIMACS file",
                       description="Sample satisfying and falsifying assignments into a dataset CSV.")
    s.add_argument("--cnf", required=True, help="DIMACS input file")
    s.add_argument("--pos", type=int, default=500, help="satisfying rows wanted (default 500)")
    s.add_argument("--neg", type=int, default=500, help="falsifying rows wanted (default 500)")
    s.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    s.add_argument("--max-decisions", type=int, default=SamplerBudget.max_decisions,
                   help=f"solver decision budget (default {SamplerBudget.max_decisions})")
    s.add_argument("--out", help="output CSV (default stdout)")

    t = sub.add_parser("train", help="5-fold cross-validate one model on a dataset",
                       description="Cross-validate an MLP (or the decision tree) and print a CSV report.")
    t.add_argument("--data", required=True, help="dataset CSV")
    t.add_argument("--model", choices=("mlp", "tree"), default="mlp", help="learner (default mlp)")
    _mlp_flags(t)

    w = sub.add_parser("sweep", help="hidden-width sweep 1..256 on a dataset",
                       description="Single hidden layer of width 1, 2, 4, ..., 256; stop at the first perfect fit.")
    w.add_argument("--data", required=True, help="dataset CSV")
    _mlp_flags(w, hidden=False)

    e = sub.add_parser("experiment", help="run or resume an experiment config",
                       description="Run an experiment config; rerunning resumes from the journal.")
    e.add_argument("--config", required=True, help="experiment config file")
    e.add_argument("--workers", type=int, help="worker processes (default: config value, else all cores)")
    e.add_argument("--out", help="output directory (overrides the config)")
    e.add_argument("--seed", type=int, help="master seed (overrides the config)")

    r = sub.add_parser("report", help="regenerate tables and figures from a journal",
                       description="Rebuild rows, summary and figure files from journal.log.")
    r.add_argument("--dir", required=True, help="experiment output directory holding journal.log")
    r.add_argument("--out", help="where to write the files (default: --dir)")
    return p


def cmd_gen(a) -> None:
    if a.family == "random3cnf":
        if a.vars is None or (a.level is None) == (a.clauses is None):
            raise UsageError("random3cnf needs --vars and exactly one of --level/--clauses")
        if a.level is not None:
            if not -5 <= a.level <= 5:
                raise UsageError("--level must lie in -5..5")
            if a.vars < 3:
                raise UsageError("--vars must be at least 3")
            m = next(l.clause_count for l in constrainedness_grid(a.vars) if l.offset_index == a.level)
        else:
            m = a.clauses
        f = random_3cnf(a.vars, m, a.seed)
    elif a.family == "flat3gcp":
        if a.nodes is None or a.edges is None:
            raise UsageError("flat3gcp needs --nodes and --edges")
        if a.copies < 1:
            raise UsageError("--copies must be >= 1")
        parts = [flat_3colorable(a.nodes, a.edges, a.seed if a.copies == 1 else derive_seed(a.seed, i))[0]
                 for i in range(a.copies)]
        f = encode_gcp(parts[0] if a.copies == 1 else disjoint_union(parts), 3)
    elif a.family == "morphed5gcp":
        if a.ratio is None:
            raise UsageError("morphed5gcp needs --ratio")
        n = a.nodes or 100
        g2 = ring_lattice(n, a.degree)
        g1 = gnm(n, g2.num_edges, derive_seed(a.seed, "graph"))
        f = encode_gcp(morph(g1, g2, a.ratio, derive_seed(a.seed, "morph")), 5)
    else:
        if a.nodes is None:
            raise UsageError("clique3 needs --nodes")
        p = clique_edge_probability(a.nodes, 3, a.expected_cliques)
        f = encode_kclique(gnp(a.nodes, p, a.seed), 3)
    _seed_note(seed=a.seed)
    _write(write_dimacs(f), a.out)


def cmd_sample(a) -> None:
    f = read_dimacs_file(a.cnf)
    if a.pos < 1 or a.neg < 1:
        raise UsageError("--pos and --neg must be >= 1")
    try:
        budget = SamplerBudget(max_decisions=a.max_decisions)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _seed_note(seed=a.seed)
    d = build_dataset(f, a.pos, a.neg, a.seed, budget, formula_id=Path(a.cnf).name)
    _write(write_csv(d), a.out)


def _load_data(path: str):
    with open(path) as fh:
        return read_csv(fh.read())


def _check_folds(d, folds: int) -> None:
    if folds < 2 or len(d) < folds:
        raise UsageError(f"--folds must be between 2 and the {len(d)} dataset rows")


def cmd_train(a) -> None:
    d = _load_data(a.data)
    _check_folds(d, a.folds)
    if a.model == "tree":
        rep = cross_validate_tree(d, a.folds)
    else:
        cfg = _mlp_config(a)
        _seed_note(seed=cfg.seed)
        rep = cross_validate(d, cfg, a.folds)
    print(rep.csv_header())
    print(rep.csv_line())


def cmd_sweep(a) -> None:
    d = _load_data(a.data)
    _check_folds(d, a.folds)
    cfg = _mlp_config(a, hidden_layers=(1,))
    _seed_note(seed=cfg.seed)
    res = neuron_sweep(d, a.activation, cfg, k=a.folds)
    first = next(iter(res.reports.values()))
    print("neurons," + first.csv_header())
    for size, rep in res.reports.items():
        print(f"{size},{rep.csv_line()}")
    print(f"min_neurons,{res.min_neurons if res.learned else 'not_learned'}")


def cmd_experiment(a) -> None:
    spec = load_config(a.config)
    kw = {}
    if a.out:
        kw["output_dir"] = a.out
    if a.seed is not None:
        kw["master_seed"] = a.seed
    if a.workers is not None:
        if a.workers < 1:
            raise UsageError("--workers must be >= 1")
        kw["workers"] = a.workers
    spec = spec.with_(**kw) if kw else spec
    _seed_note(master_seed=spec.master_seed)
    summaries = run_and_report(spec, spec.workers or os.cpu_count() or 1)
    print(f"wrote {spec.output_dir}: {len(summaries)} sets", file=sys.stderr)


def cmd_report(a) -> None:
    try:
        rows = journal_rows(a.dir)
    except FileNotFoundError as e:
        raise UsageError(str(e)) from None
    out = a.out or a.dir
    write_report(rows, summarize(rows), out)
    seeds = sorted({r["seed"] for r in rows})
    _seed_note(formula_seeds=len(seeds))
    print(f"wrote {out}", file=sys.stderr)


COMMANDS = {"gen": cmd_gen, "sample": cmd_sample, "train": cmd_train, "sweep": cmd_sweep,
            "experiment": cmd_experiment, "report": cmd_report}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[a.command](a)
    except USER_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception:
        log.exception("internal error")
        return 2
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
