"""Model sampling: exact enumeration for small model sets, XOR-hashed cells otherwise."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..formula import CnfFormula, evaluate_many
from .dpll import BudgetExhausted
from .search import count_models, enumerate_models, restrict, variable_components
from .xor import conjoin_xors, random_xors

log = logging.getLogger(__name__)

UNIFORM, HASHED, FALLBACK = "uniform", "hashed", "fallback"


class SamplerFailure(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class SamplerBudget:
    max_decisions: int = 200_000
    max_models_per_cell: int = 160
    cell_target: int = 40
    xor_density: float = 0.5
    max_cell_rounds: int = 200

    def __post_init__(self):
        if min(self.max_decisions, self.max_models_per_cell, self.cell_target, self.max_cell_rounds) < 1:
            raise ValueError("sampler budget limits must be positive")
        if not 0.0 < self.xor_density <= 1.0:
            raise ValueError("xor_density must lie in (0, 1]")


@dataclass(frozen=True)
class SampleResult:
    models: np.ndarray  # (k, num_vars) uint8
    mode: str
    model_count: int | None


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 0 else 0


def fallback_sample(f: CnfFormula, want: int, budget: SamplerBudget) -> SampleResult:
    log.info("sampler falling back to plain enumeration")
    try:
        models = enumerate_models(f, want, expand_free=True, max_decisions=budget.max_decisions)
    except BudgetExhausted:
        models = []
    if not models:
        raise SamplerFailure("budget_exhausted")
    return SampleResult(np.array(models, dtype=np.uint8), FALLBACK, None)


def _hashed(f: CnfFormula, want: int, count: int, rng: np.random.Generator,
            budget: SamplerBudget) -> SampleResult:
    h = max(0, _ceil_log2(count) - _ceil_log2(budget.cell_target))
    variables = list(range(1, f.num_vars + 1))
    pool: list[np.ndarray] = []
    rounds = 0
    while len(pool) < want:
        rounds += 1
        if rounds > budget.max_cell_rounds:
            return fallback_sample(f, want, budget)
        g = conjoin_xors(f, random_xors(variables, h, budget.xor_density, rng))
        if g is None:
            continue
        try:
            cell = enumerate_models(g, budget.max_models_per_cell + 1, expand_free=False,
                                    max_decisions=budget.max_decisions)
        except BudgetExhausted:
            return fallback_sample(f, want, budget)
        if not 1 <= len(cell) <= budget.max_models_per_cell:
            continue
        # the whole cell is kept: each model lands in it with the same probability
        for i in rng.permutation(len(cell)):
            pool.append(cell[i][: f.num_vars])
    return SampleResult(np.array(pool[:want], dtype=np.uint8), HASHED, count)


def _sample(f: CnfFormula, want: int, rng: np.random.Generator, budget: SamplerBudget,
            count: int | None = None) -> SampleResult:
    if count is None:
        try:
            count = count_models(f, budget.max_decisions)
        except BudgetExhausted:
            return fallback_sample(f, want, budget)
    if count == 0:
        raise SamplerFailure("unsat")
    if count <= 4 * budget.cell_target:
        models = np.array(enumerate_models(f, count), dtype=np.uint8)
        return SampleResult(models[rng.integers(0, count, size=want)], UNIFORM, count)
    groups, free = variable_components(f)
    if len(groups) + len(free) > 1:
        # independent parts: a uniform draw per part is a uniform draw of the whole
        out = np.zeros((want, f.num_vars), dtype=np.uint8)
        modes = set()
        for clause_ids in groups:
            sub, vars_ = restrict(f, clause_ids)
            part = _sample(sub, want, rng, budget)
            if part.mode == FALLBACK:
                return fallback_sample(f, want, budget)
            modes.add(part.mode)
            out[:, np.asarray(vars_) - 1] = part.models
        if free:
            out[:, np.asarray(free) - 1] = rng.integers(0, 2, size=(want, len(free)), dtype=np.uint8)
        return SampleResult(out, HASHED if HASHED in modes else UNIFORM, count)
    return _hashed(f, want, count, rng, budget)


def sample_models(f: CnfFormula, want: int, seed: int,
                  budget: SamplerBudget | None = None, count: int | None = None) -> SampleResult:
    """Draw ``want`` models (with replacement) as uniformly as the budget allows.

    Small model sets are enumerated and drawn from exactly; larger ones are
    split into variable-disjoint parts and sampled through random XOR cells.
    When counting or a cell search exceeds the budget the result degrades to
    plain enumeration and ``mode`` says so.
    """
    if want < 1:
        raise ValueError("want must be at least 1")
    budget = budget or SamplerBudget()
    res = _sample(f, want, np.random.default_rng(seed), budget, count)
    if not evaluate_many(f, res.models).all():
        raise AssertionError("sampler produced a non-model")
    return res
