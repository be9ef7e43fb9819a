"""CNF formulas, assignment evaluation and DIMACS serialization.

Literals are DIMACS-style signed integers (``3`` is x3, ``-3`` is not x3).
Assignments are dense 0/1 numpy vectors where position ``i`` holds the value
of variable ``i + 1``; they double as dataset feature rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Clause = tuple[int, ...]


class FormulaError(ValueError):
    """A formula or assignment violates a structural contract."""


class DimacsError(ValueError):
    """Malformed DIMACS input; the message carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]
    # "c" lines; informational only, ignored by equality
    comments: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise FormulaError("num_vars must be non-negative")
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for i, c in enumerate(clauses):
            if not c:
                raise FormulaError(f"clause {i} is empty")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise FormulaError(
                        f"clause {i} literal {lit} outside 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "comments", tuple(self.comments))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def with_clauses(self, extra: Iterable[Sequence[int]]) -> "CnfFormula":
        return CnfFormula(self.num_vars, self.clauses + tuple(tuple(c) for c in extra),
                          self.comments)


def as_assignment(values, num_vars: int | None = None) -> np.ndarray:
    a = np.asarray(values, dtype=np.uint8)
    if a.ndim != 1:
        raise FormulaError("assignment must be a flat bit vector")
    if np.any(a > 1):
        raise FormulaError("assignment values must be 0 or 1")
    if num_vars is not None and a.shape[0] != num_vars:
        raise FormulaError(f"assignment has length {a.shape[0]}, formula has {num_vars} variables")
    return a


def evaluate(f: CnfFormula, a) -> bool:
    """True iff every clause of ``f`` has a literal made true by ``a``."""
    a = as_assignment(a, f.num_vars)
    for clause in f.clauses:
        for lit in clause:
            if (a[abs(lit) - 1] == 1) == (lit > 0):
                break
        else:
            return False
    return True


def evaluate_many(f: CnfFormula, rows) -> np.ndarray:
    """Vectorised :func:`evaluate` over a 2-D array of assignments."""
    X = np.asarray(rows, dtype=np.uint8)
    if X.ndim != 2 or X.shape[1] != f.num_vars:
        raise FormulaError(f"expected rows of length {f.num_vars}")
    ok = np.ones(X.shape[0], dtype=bool)
    by_len: dict[int, list[Clause]] = {}
    for c in f.clauses:
        by_len.setdefault(len(c), []).append(c)
    Xb = X.astype(bool)
    for clauses in by_len.values():
        lits = np.array(clauses)
        idx = np.abs(lits) - 1
        pos = lits > 0
        # (rows, clauses, k) literal truth values
        truth = Xb[:, idx] == pos
        ok &= truth.any(axis=2).all(axis=1)
    return ok


def add_blocking_clause(f: CnfFormula, m) -> CnfFormula:
    """Return ``f`` plus the clause excluding exactly the model ``m``."""
    m = as_assignment(m, f.num_vars)
    if not evaluate(f, m):
        raise FormulaError("assignment to block does not satisfy the formula")
    block = tuple(-(i + 1) if bit else i + 1 for i, bit in enumerate(m))
    return f.with_clauses([block])


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[Clause] = []
    comments: list[str] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        last_line = lineno
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            try:
                nv, nc = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed problem line {line!r}", lineno) from None
            if nv < 0 or nc < 0:
                raise DimacsError("negative counts in problem line", lineno)
            header = (nv, nc)
            continue
        if header is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"invalid literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        # tolerated: final clause without the terminating 0
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise DimacsError(
            f"header declares {header[1]} clauses but {len(clauses)} were found", last_line)
    return CnfFormula(header[0], tuple(clauses), tuple(comments))


def write_dimacs(f: CnfFormula) -> str:
    lines = [f"c {c}" if c else "c" for c in f.comments]
    lines.append(f"p cnf {f.num_vars} {f.num_clauses}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs_file(path) -> CnfFormula:
    with open(path) as fh:
        return parse_dimacs(fh.read())
