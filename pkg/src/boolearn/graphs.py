"""Undirected simple graphs feeding the colouring and clique encoders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            e = (u, v) if u < v else (v, u)
            if e in norm:
                raise GraphError(f"duplicate edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        return cls(n, tuple(edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def to_edge_list(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)


def _pair_from_index(n: int, idx: np.ndarray) -> list[Edge]:
    iu, iv = np.triu_indices(n, k=1)
    return [(int(iu[i]), int(iv[i])) for i in idx]


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): every pair independently with probability p."""
    if n < 1:
        raise GraphError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    draws = rng.random(n * (n - 1) // 2)
    return Graph(n, tuple(_pair_from_index(n, np.flatnonzero(draws < p))))


def gnm(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with exactly m edges."""
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise GraphError(f"cannot place {m} edges on {n} vertices (max {total})")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(total, size=m, replace=False))
    return Graph(n, tuple(_pair_from_index(n, idx)))


def ring_lattice(n: int, degree: int) -> Graph:
    """Cyclic lattice: vertex i joined to i +- 1 .. i +- degree/2 (mod n)."""
    if degree % 2:
        raise GraphError("ring lattice degree must be even")
    if degree >= n:
        raise GraphError("ring lattice degree must be smaller than n")
    edges = set()
    for i in range(n):
        for d in range(1, degree // 2 + 1):
            j = (i + d) % n
            edges.add((min(i, j), max(i, j)))
    return Graph(n, tuple(edges))


def flat_3colorable(n: int, m: int, seed: int) -> tuple[Graph, np.ndarray]:
    """Random graph with a planted proper 3-colouring and balanced class-pair edge counts.

    Vertices are shuffled into three classes whose sizes differ by at most one
    (the larger classes first); each of the three class pairs receives m // 3
    or m // 3 + 1 edges drawn uniformly among its cross pairs. Returns the
    graph and the planted colour of every vertex.
    """
    if n < 3:
        raise GraphError("flat 3-colourable graphs need at least 3 vertices")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    classes = [np.sort(c) for c in np.array_split(perm, 3)]
    sizes = [len(c) for c in classes]
    capacity = min(sizes[a] * sizes[b] for a, b in ((0, 1), (0, 2), (1, 2)))
    if -(-m // 3) > capacity:
        raise GraphError(f"{m} edges cannot be spread evenly over class pairs of capacity {capacity}")
    colors = np.empty(n, dtype=np.int64)
    for c, members in enumerate(classes):
        colors[members] = c
    quota = [m // 3] * 3
    for i in rng.permutation(3)[: m % 3]:
        quota[i] += 1
    edges = []
    for (a, b), q in zip(((0, 1), (0, 2), (1, 2)), quota):
        sb = sizes[b]
        picks = rng.choice(sizes[a] * sb, size=q, replace=False)
        for p in np.sort(picks):
            u, v = int(classes[a][p // sb]), int(classes[b][p % sb])
            edges.append((min(u, v), max(u, v)))
    return Graph(n, tuple(edges)), colors


def is_proper_coloring(g: Graph, colors) -> bool:
    return all(colors[u] != colors[v] for u, v in g.edges)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def morph(g1: Graph, g2: Graph, r: float, seed: int) -> Graph:
    """r-morph keeping |E1| edges: E1&E2, round(r|E1-E2|) from E1-E2, rest from E2-E1."""
    if g1.n != g2.n:
        raise GraphError(f"vertex counts differ ({g1.n} vs {g2.n})")
    if not 0.0 <= r <= 1.0:
        raise GraphError(f"morph ratio {r} outside [0, 1]")
    e1, e2 = g1.edge_set(), g2.edge_set()
    common = e1 & e2
    only1 = sorted(e1 - e2)
    only2 = sorted(e2 - e1)
    rng = np.random.default_rng(seed)
    k1 = _round_half_up(r * len(only1))
    k2 = min(len(only2), max(0, len(e1) - len(common) - k1))
    pick1 = rng.choice(len(only1), size=k1, replace=False) if k1 else []
    pick2 = rng.choice(len(only2), size=k2, replace=False) if k2 else []
    edges = set(common)
    edges.update(only1[i] for i in pick1)
    edges.update(only2[i] for i in pick2)
    return Graph(g1.n, tuple(edges))


def clique_edge_probability(n: int, k: int, expected_cliques: float) -> float:
    """Edge probability giving ``expected_cliques`` k-cliques on average in G(n, p)."""
    if k > n:
        raise GraphError("k exceeds n")
    if expected_cliques <= 0:
        raise GraphError("expected clique count must be positive")
    subsets = math.comb(n, k)
    if expected_cliques > subsets:
        raise GraphError(f"{expected_cliques} cliques exceed C({n},{k}) = {subsets}")
    return (expected_cliques / subsets) ** (1.0 / math.comb(k, 2))


def count_k_cliques(g: Graph, k: int) -> int:
    """Exact k-clique count by ordered extension over common neighbourhoods.

    Exhaustive; intended for small graphs (n up to ~60, k up to 4).
    """
    if k > g.n:
        raise GraphError("k exceeds n")
    if k <= 0:
        return 1
    higher = [{w for w in nbrs if w > v} for v, nbrs in enumerate(g.adjacency())]

    def extend(cands: set[int], depth: int) -> int:
        if depth == k:
            return 1
        if depth == k - 1:
            return len(cands)
        return sum(extend(cands & higher[v], depth + 1) for v in cands)

    return sum(extend(higher[v], 1) for v in range(g.n))


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    """Graphs side by side; the vertices of graphs[i] are shifted past those of graphs[:i]."""
    edges, offset = [], 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, tuple(edges))
