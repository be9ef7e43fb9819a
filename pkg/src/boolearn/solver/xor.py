"""Random parity constraints and their CNF translation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..formula import CnfFormula


@dataclass(frozen=True)
class XorConstraint:
    variables: tuple[int, ...]
    parity: int  # required XOR of the variables' values


def random_xors(variables: list[int], count: int, density: float,
                rng: np.random.Generator) -> list[XorConstraint]:
    """``count`` parities, each variable included with probability ``density``."""
    out = []
    vars_arr = np.asarray(variables, dtype=np.int64)
    for _ in range(count):
        mask = rng.random(len(vars_arr)) < density
        parity = int(rng.integers(0, 2))
        out.append(XorConstraint(tuple(int(v) for v in vars_arr[mask]), parity))
    return out


def xor_satisfied(x: XorConstraint, bits) -> bool:
    return sum(int(bits[v - 1]) for v in x.variables) % 2 == x.parity


def conjoin_xors(f: CnfFormula, xors: list[XorConstraint]) -> CnfFormula | None:
    """CNF for ``f`` and the parities, or None if some parity is trivially false.

    A parity over a1..aL becomes the chain t1 = a1 ^ a2, t_i = t_(i-1) ^ a_(i+1),
    each link four 3-literal clauses, closed by a unit on the last link. Chain
    variables are numbered after f's, are functionally determined by f's
    variables, and so never multiply the model count.
    """
    nv = f.num_vars
    extra: list[tuple[int, ...]] = []
    for x in xors:
        vs = x.variables
        if not vs:
            if x.parity:
                return None
            continue
        if len(vs) == 1:
            extra.append((vs[0],) if x.parity else (-vs[0],))
            continue
        prev = vs[0]
        for a in vs[1:]:
            nv += 1
            t = nv
            extra += [(-t, prev, a), (-t, -prev, -a), (t, -prev, a), (t, prev, -a)]
            prev = t
        extra.append((prev,) if x.parity else (-prev,))
    return CnfFormula(nv, f.clauses + tuple(extra))
