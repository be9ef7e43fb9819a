"""Satisfiability, enumeration and exact counting on top of :class:`Search`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..formula import CnfFormula, evaluate
from .dpll import BudgetExhausted, Search, completions

SAT, UNSAT, BUDGET = "sat", "unsat", "budget_exhausted"


@dataclass(frozen=True)
class SolveResult:
    status: str
    model: np.ndarray | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == SAT


def solve(f: CnfFormula, budget: int | None = None) -> SolveResult:
    s = Search(f.num_vars, f.clauses)
    try:
        for _ in s.leaves(max_decisions=budget):
            model = s.current_bits()
            assert evaluate(f, model)
            return SolveResult(SAT, model)
    except BudgetExhausted:
        return SolveResult(BUDGET)
    return SolveResult(UNSAT)


def enumerate_models(f: CnfFormula, limit: int, expand_free: bool = True,
                     max_decisions: int | None = None) -> list[np.ndarray]:
    """Up to ``limit`` distinct models in search order.

    Each satisfying leaf acts as a blocked model: the search backtracks past it
    and continues, so no model repeats. With ``expand_free`` a leaf reached
    while variables are still unassigned emits all of its 2^t completions.
    Raises :class:`BudgetExhausted` if the decision budget runs out first.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    s = Search(f.num_vars, f.clauses, track_satisfied=expand_free)
    out: list[np.ndarray] = []
    for _ in s.leaves(max_decisions=max_decisions, stop_when_satisfied=expand_free):
        for m in completions(s.current_bits(), s.free_vars()):
            out.append(m)
            if len(out) >= limit:
                return out
    return out


def variable_components(f: CnfFormula) -> tuple[list[list[int]], list[int]]:
    """Variable-disjoint clause groups and the variables that occur in no clause.

    Returns (clause index lists per component, unconstrained variables); both
    ordered by smallest variable.
    """
    parent = list(range(f.num_vars + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    used = [False] * (f.num_vars + 1)
    for c in f.clauses:
        r = find(abs(c[0]))
        used[abs(c[0])] = True
        for lit in c[1:]:
            used[abs(lit)] = True
            r2 = find(abs(lit))
            if r2 != r:
                parent[max(r, r2)] = min(r, r2)
                r = min(r, r2)
    groups: dict[int, list[int]] = {}
    for ci, c in enumerate(f.clauses):
        groups.setdefault(find(abs(c[0])), []).append(ci)
    free = [v for v in range(1, f.num_vars + 1) if not used[v]]
    return [groups[k] for k in sorted(groups)], free


def restrict(f: CnfFormula, clause_ids: list[int]) -> tuple[CnfFormula, list[int]]:
    """Sub-formula over the given clauses with variables renumbered densely.

    Returns the sub-formula and the original variable for each new index.
    """
    vars_ = sorted({abs(l) for ci in clause_ids for l in f.clauses[ci]})
    remap = {v: i + 1 for i, v in enumerate(vars_)}
    clauses = tuple(tuple(remap[abs(l)] if l > 0 else -remap[abs(l)] for l in f.clauses[ci])
                    for ci in clause_ids)
    return CnfFormula(len(vars_), clauses), vars_


def _count_leaves(f: CnfFormula, budget: int | None) -> tuple[int, int]:
    s = Search(f.num_vars, f.clauses, track_satisfied=True)
    total = 0
    for free in s.leaves(max_decisions=budget, stop_when_satisfied=True):
        total += 1 << free
    return total, s.decisions


def count_models(f: CnfFormula, budget: int | None = None) -> int:
    """Exact model count; raises :class:`BudgetExhausted` rather than guess.

    Variable-disjoint parts are counted separately and multiplied; each part is
    counted by backtracking, adding 2^t at every leaf with t free variables.
    The decision budget is shared across parts.
    """
    groups, free = variable_components(f)
    total = 1 << len(free)
    remaining = budget
    for clause_ids in groups:
        sub, _ = restrict(f, clause_ids)
        count, used = _count_leaves(sub, remaining)
        if count == 0:
            return 0
        total *= count
        if remaining is not None:
            remaining -= used
    return total
