"""DPLL search with two-watched-literal unit propagation.

Branching is chronological, on the lowest-index unassigned variable, false
first. The same search drives satisfiability checks, model enumeration and
leaf-counting, so every result is a deterministic function of the formula.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator, Sequence

import numpy as np


class BudgetExhausted(Exception):
    """The decision budget ran out before the search could finish."""


class Search:
    """Mutable search state over one clause list. Not thread-safe; one per worker."""

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]], track_satisfied: bool = False):
        n = num_vars
        self.n = n
        self.val = [0] * (n + 1)
        self.trail: list[int] = []
        self.qhead = 0
        self.decisions = 0
        self.consistent = True
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 1)]
        self.units: list[int] = []
        self.track = track_satisfied
        kept: list[list[int]] = []
        for c in clauses:
            lits = list(dict.fromkeys(c))
            seen = set(lits)
            if any(-l in seen for l in lits):
                continue  # tautology
            kept.append(lits)
            if len(lits) == 1:
                self.units.append(lits[0])
                continue
            ci = len(self.clauses)
            self.clauses.append(lits)
            self.watches[lits[0] + n].append(ci)
            self.watches[lits[1] + n].append(ci)
        if self.track:
            self.occ: list[list[int]] = [[] for _ in range(2 * n + 1)]
            for ci, lits in enumerate(kept):
                for l in lits:
                    self.occ[l + n].append(ci)
            self.sat_count = [0] * len(kept)
            self.n_sat = 0
            self.n_total = len(kept)

    def _assign(self, lit: int) -> None:
        self.val[lit if lit > 0 else -lit] = 1 if lit > 0 else -1
        self.trail.append(lit)
        if self.track:
            sc = self.sat_count
            for ci in self.occ[lit + self.n]:
                sc[ci] += 1
                if sc[ci] == 1:
                    self.n_sat += 1

    def _undo(self, trail_len: int) -> None:
        trail, val = self.trail, self.val
        track = self.track
        n = self.n
        while len(trail) > trail_len:
            lit = trail.pop()
            val[lit if lit > 0 else -lit] = 0
            if track:
                sc = self.sat_count
                for ci in self.occ[lit + n]:
                    sc[ci] -= 1
                    if sc[ci] == 0:
                        self.n_sat -= 1
        self.qhead = len(trail)

    def _propagate(self) -> bool:
        trail, val, watches, clauses = self.trail, self.val, self.watches, self.clauses
        n = self.n
        while self.qhead < len(trail):
            false_lit = -trail[self.qhead]
            self.qhead += 1
            ws = watches[false_lit + n]
            i = j = 0
            nw = len(ws)
            while i < nw:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    l = c[k]
                    if (val[l] if l > 0 else -val[-l]) != -1:
                        c[1], c[k] = l, false_lit
                        watches[l + n].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv == -1:
                        while i < nw:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return False
                    self._assign(first)
            del ws[j:]
        return True

    def _backtrack(self, stack: list[list[int]]) -> int | None:
        """Flip the most recent unflipped decision; returns the next scan start or None when exhausted."""
        while stack:
            var, trail_len, flipped = stack.pop()
            self._undo(trail_len)
            if flipped:
                continue
            stack.append([var, trail_len, 1])
            self.decisions += 1
            self._assign(var)
            if self._propagate():
                return var + 1
        return None

    def leaves(self, max_decisions: int | None = None, stop_when_satisfied: bool = False) -> Iterator[int]:
        """Depth-first over satisfying leaves; yields the number of free variables at each.

        With ``stop_when_satisfied`` a leaf is reported as soon as every clause
        is satisfied, leaving the remaining variables free; otherwise leaves are
        total assignments (0 free). The caller reads ``self.val`` at each yield.
        """
        if stop_when_satisfied and not self.track:
            raise ValueError("stop_when_satisfied needs track_satisfied=True")
        if not self.consistent:
            return
        for u in self.units:
            v = self.val[abs(u)] * (1 if u > 0 else -1)
            if v == -1:
                self.consistent = False
                return
            if v == 0:
                self._assign(u)
        if not self._propagate():
            self.consistent = False
            return
        n, val = self.n, self.val
        stack: list[list[int]] = []
        nxt: int | None = 1
        while nxt is not None:
            if stop_when_satisfied and self.n_sat == self.n_total:
                yield n - len(self.trail)
                nxt = self._backtrack(stack)
                continue
            v = nxt
            while v <= n and val[v] != 0:
                v += 1
            if v > n:
                yield 0
                nxt = self._backtrack(stack)
                continue
            if max_decisions is not None and self.decisions >= max_decisions:
                raise BudgetExhausted(f"decision budget {max_decisions} exhausted")
            self.decisions += 1
            stack.append([v, len(self.trail), 0])
            self._assign(-v)
            if self._propagate():
                nxt = v + 1
            else:
                nxt = self._backtrack(stack)

    def current_bits(self) -> np.ndarray:
        return (np.asarray(self.val[1:], dtype=np.int8) == 1).astype(np.uint8)

    def free_vars(self) -> list[int]:
        return [i for i in range(1, self.n + 1) if self.val[i] == 0]


def completions(base: np.ndarray, free: list[int]) -> Iterator[np.ndarray]:
    """All 2^t completions of a partial model, last free variable varying fastest."""
    if not free:
        yield base.copy()
        return
    idx = np.asarray(free) - 1
    for bits in product((0, 1), repeat=len(free)):
        out = base.copy()
        out[idx] = bits
        yield out
