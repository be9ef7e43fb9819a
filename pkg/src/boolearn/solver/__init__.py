"""Decision, enumeration, exact counting and sampling for desk-scale CNFs."""

from .dpll import BudgetExhausted
from .sampling import FALLBACK, fallback_sample, HASHED, UNIFORM, SampleResult, SamplerBudget, SamplerFailure, sample_models
from .search import (BUDGET, SAT, UNSAT, SolveResult, count_models, enumerate_models, solve,
                     variable_components)
from .xor import XorConstraint, conjoin_xors, random_xors, xor_satisfied

__all__ = [
    "BUDGET", "BudgetExhausted", "FALLBACK", "HASHED", "SAT", "SampleResult", "SamplerBudget",
    "SamplerFailure", "SolveResult", "fallback_sample", "UNIFORM", "UNSAT", "XorConstraint", "conjoin_xors",
    "count_models", "enumerate_models", "random_xors", "sample_models", "solve",
    "variable_components", "xor_satisfied",
]
