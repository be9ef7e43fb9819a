"""Formula generators: random 3-CNF at controlled constrainedness, k-colouring and k-clique encodings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .formula import CnfFormula
from .graphs import Graph


@dataclass(frozen=True)
class PhaseEntry:
    num_vars: int
    phase_ratio: float
    clause_count: int
    source: str  # "measured" or "formula"


@dataclass(frozen=True)
class ConstrainednessLevel:
    offset_index: int
    ratio: float
    clause_count: int


# Directly measured crossover ratios; every other size uses the fitted curve.
MEASURED_PHASE_RATIOS = {
    20: Fraction("4.550"),
    50: Fraction("4.360"),
    100: Fraction("4.310"),
}

LEVELS = tuple(range(-5, 6))


def random_3cnf(v: int, m: int, seed: int) -> CnfFormula:
    """Fixed-length random 3-CNF: 3 distinct variables per clause, fair signs, repeats allowed."""
    if v < 3:
        raise ValueError("random 3-CNF needs at least 3 variables")
    if m < 0:
        raise ValueError("clause count must be non-negative")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vars_ = rng.choice(v, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3)
        clauses.append(tuple(int(x) if s else -int(x) for x, s in zip(vars_, signs)))
    return CnfFormula(v, tuple(clauses), (f"generator=random3cnf vars={v} clauses={m} seed={seed}",))


def _fitted_clause_count(v: int) -> int:
    return math.floor(4.258 * v + 58.26 * v ** (-2.0 / 3.0))


def phase_table(v: int) -> PhaseEntry:
    if v < 1:
        raise ValueError("v must be positive")
    if v in MEASURED_PHASE_RATIOS:
        ratio = MEASURED_PHASE_RATIOS[v]
        count = ratio * v
        assert count.denominator == 1
        return PhaseEntry(v, float(ratio), int(count), "measured")
    count = _fitted_clause_count(v)
    return PhaseEntry(v, count / v, count, "formula")


def _phase_fraction(v: int) -> Fraction:
    if v in MEASURED_PHASE_RATIOS:
        return MEASURED_PHASE_RATIOS[v]
    return Fraction(_fitted_clause_count(v), v)


def constrainedness_grid(v: int) -> list[ConstrainednessLevel]:
    """Eleven levels at the phase ratio offset by -0.5 .. +0.5 in steps of 0.1."""
    if v < 3:
        raise ValueError("v must be at least 3")
    phase = _phase_fraction(v)
    base = phase_table(v).clause_count
    grid = []
    for k in LEVELS:
        ratio = phase + Fraction(k, 10)
        if k == 0:
            count = base
        else:
            # half away from zero; the product is always positive here
            count = math.floor(ratio * v + Fraction(1, 2))
        grid.append(ConstrainednessLevel(k, float(ratio), int(count)))
    return grid


def gcp_var(vertex: int, color: int, k: int) -> int:
    return vertex * k + color + 1


def encode_gcp(g: Graph, k: int) -> CnfFormula:
    """Direct k-colouring encoding: at-least-one, pairwise at-most-one, edge conflicts."""
    if k < 2:
        raise ValueError("need at least 2 colours")
    clauses = []
    for v in range(g.n):
        clauses.append(tuple(gcp_var(v, c, k) for c in range(k)))
    for v in range(g.n):
        for c1, c2 in combinations(range(k), 2):
            clauses.append((-gcp_var(v, c1, k), -gcp_var(v, c2, k)))
    for u, v in g.edges:
        for c in range(k):
            clauses.append((-gcp_var(u, c, k), -gcp_var(v, c, k)))
    return CnfFormula(g.n * k, tuple(clauses),
                      (f"generator=gcp colors={k} nodes={g.n} edges={g.num_edges}",))


def clique_var(slot: int, vertex: int, n: int) -> int:
    return slot * n + vertex + 1


def encode_kclique(g: Graph, k: int) -> CnfFormula:
    """Slot encoding: slot i holds exactly one vertex, slots hold distinct mutually adjacent vertices."""
    n = g.n
    if k > n:
        raise ValueError("k exceeds the number of vertices")
    clauses = []
    for i in range(k):
        clauses.append(tuple(clique_var(i, v, n) for v in range(n)))
    for i in range(k):
        for u, v in combinations(range(n), 2):
            clauses.append((-clique_var(i, u, n), -clique_var(i, v, n)))
    for v in range(n):
        for i, j in combinations(range(k), 2):
            clauses.append((-clique_var(i, v, n), -clique_var(j, v, n)))
    edges = g.edge_set()
    non_adjacent = [(u, v) for u, v in combinations(range(n), 2) if (u, v) not in edges]
    for i, j in combinations(range(k), 2):
        for u, v in non_adjacent:
            clauses.append((-clique_var(i, u, n), -clique_var(j, v, n)))
            clauses.append((-clique_var(i, v, n), -clique_var(j, u, n)))
    return CnfFormula(k * n, tuple(clauses),
                      (f"generator=kclique k={k} nodes={n} edges={g.num_edges}",))
