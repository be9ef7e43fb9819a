"""Labelled datasets of satisfying and falsifying assignments, and their CSV form."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .formula import CnfFormula, evaluate_many
from .seeds import derive_seed
from .solver import (BudgetExhausted, SamplerBudget, SamplerFailure, count_models, enumerate_models,
                     fallback_sample, sample_models)


class TooFewNegatives(Exception):
    def __init__(self, found: int, want: int, tries: int):
        self.found, self.want, self.tries = found, want, tries
        super().__init__(f"only {found} of {want} falsifying assignments in {tries} tries")


class PositivesUnavailable(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class DatasetFormatError(ValueError):
    pass


@dataclass
class Dataset:
    num_vars: int
    X: np.ndarray  # (rows, num_vars) uint8, post-shuffle order
    y: np.ndarray  # (rows,) uint8, 1 = satisfies
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.uint8).reshape(-1, self.num_vars)
        self.y = np.asarray(self.y, dtype=np.uint8).reshape(-1)
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("feature and label row counts differ")

    def __len__(self) -> int:
        return self.y.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.num_vars == other.num_vars and np.array_equal(self.X, other.X)
                and np.array_equal(self.y, other.y) and self.provenance == other.provenance)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.num_vars, self.X[idx], self.y[idx], dict(self.provenance))


def gen_negative(f: CnfFormula, want: int, seed: int, max_tries: int | None = None,
                 chunk: int = 4096) -> np.ndarray:
    """Fair coin-flip assignments that falsify ``f``; returns ``want`` rows (duplicates allowed)."""
    if want < 1:
        raise ValueError("want must be at least 1")
    max_tries = 100 * want if max_tries is None else max_tries
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    found = tries = 0
    while found < want and tries < max_tries:
        n = min(chunk, max_tries - tries)
        draws = rng.integers(0, 2, size=(n, f.num_vars), dtype=np.uint8)
        tries += n
        neg = draws[~evaluate_many(f, draws)]
        kept.append(neg[: want - found])
        found += min(len(neg), want - found)
    if found < want:
        raise TooFewNegatives(found, want, max_tries)
    return np.concatenate(kept)[:want]


def gen_positive(f: CnfFormula, want: int, seed: int,
                 budget: SamplerBudget | None = None) -> tuple[np.ndarray, str, int | None]:
    """Satisfying assignments; (rows, sampler mode, exact model count or None).

    A formula with fewer models than ``want`` contributes each model exactly once.
    """
    if want < 1:
        raise ValueError("want must be at least 1")
    budget = budget or SamplerBudget()
    try:
        count = count_models(f, budget.max_decisions)
    except BudgetExhausted:
        count = None
    try:
        if count == 0:
            raise SamplerFailure("unsat")
        if count is not None and count < want:
            return np.array(enumerate_models(f, count), dtype=np.uint8), "uniform", count
        if count is None:
            res = fallback_sample(f, want, budget)
        else:
            res = sample_models(f, want, seed, budget, count=count)
    except SamplerFailure as e:
        raise PositivesUnavailable(e.reason) from None
    X = res.models
    if not evaluate_many(f, X).all():
        raise AssertionError("positive sample does not satisfy the formula")
    return X, res.mode, count


def formula_generator(f: CnfFormula) -> str:
    for c in f.comments:
        for tok in c.split():
            if tok.startswith("generator="):
                return tok.split("=", 1)[1]
    return "external"


def build_dataset(f: CnfFormula, n_pos: int = 500, n_neg: int = 500, seed: int = 0,
                  budget: SamplerBudget | None = None, formula_id: str = "",
                  max_tries: int | None = None) -> Dataset:
    if n_pos < 1 or n_neg < 1:
        raise ValueError("n_pos and n_neg must be at least 1")
    pos, mode, count = gen_positive(f, n_pos, derive_seed(seed, "positive"), budget)
    neg = gen_negative(f, n_neg, derive_seed(seed, "negative"), max_tries)
    X = np.concatenate([pos, neg])
    y = np.concatenate([np.ones(len(pos), np.uint8), np.zeros(len(neg), np.uint8)])
    perm = np.random.default_rng(derive_seed(seed, "shuffle")).permutation(len(y))
    provenance = {
        "generator": formula_generator(f),
        "formula_id": formula_id,
        "seed": str(seed),
        "positives": str(len(pos)),
        "negatives": str(len(neg)),
        "sampler_mode": mode,
        "model_count": "" if count is None else str(count),
    }
    return Dataset(f.num_vars, X[perm], y[perm], provenance)


def mislabeled_rows(f: CnfFormula, d: Dataset) -> np.ndarray:
    """Indices of rows whose label disagrees with evaluating ``f``."""
    if d.num_vars != f.num_vars:
        raise ValueError("dataset and formula disagree on the number of variables")
    return np.flatnonzero(evaluate_many(f, d.X).astype(np.uint8) != d.y)


def write_csv(d: Dataset) -> str:
    out = io.StringIO()
    for k, v in d.provenance.items():
        out.write(f"# {k}={v}\n")
    out.write(",".join([f"x{i}" for i in range(1, d.num_vars + 1)] + ["y"]) + "\n")
    rows = np.concatenate([d.X, d.y[:, None]], axis=1)
    for r in rows:
        out.write(",".join("1" if b else "0" for b in r) + "\n")
    return out.getvalue()


def read_csv(text: str) -> Dataset:
    provenance: dict[str, str] = {}
    header = None
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is not None:
                raise DatasetFormatError(f"line {lineno}: comment after header")
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if not sep:
                raise DatasetFormatError(f"line {lineno}: provenance line is not key=value")
            provenance[key.strip()] = value.strip()
            continue
        cells = line.split(",")
        if header is None:
            n = len(cells) - 1
            expected = [f"x{i}" for i in range(1, n + 1)] + ["y"]
            if n < 0 or cells != expected:
                raise DatasetFormatError(f"line {lineno}: header must be x1,...,xn,y")
            header = cells
            continue
        if len(cells) != len(header):
            raise DatasetFormatError(
                f"row {len(rows) + 1} (line {lineno}): {len(cells)} cells, expected {len(header)}")
        if any(c not in ("0", "1") for c in cells):
            raise DatasetFormatError(f"row {len(rows) + 1} (line {lineno}): non-binary cell")
        rows.append([int(c) for c in cells])
    if header is None:
        raise DatasetFormatError("missing header")
    n = len(header) - 1
    arr = np.array(rows, dtype=np.uint8).reshape(-1, n + 1)
    return Dataset(n, arr[:, :n], arr[:, n], provenance)
