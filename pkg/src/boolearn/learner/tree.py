"""CART classifier over binary features (Gini impurity, unlimited depth)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset


@dataclass
class Node:
    prediction: int
    feature: int = -1
    low: "Node | None" = None   # feature == 0
    high: "Node | None" = None  # feature == 1

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.low.depth(), self.high.depth())

    def leaves(self) -> int:
        return 1 if self.is_leaf else self.low.leaves() + self.high.leaves()


def _gini(pos, total):
    p = np.divide(pos, total, out=np.zeros_like(pos, dtype=np.float64), where=total > 0)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _grow(X: np.ndarray, y: np.ndarray) -> Node:
    n = len(y)
    pos = int(y.sum())
    # majority class; ties go to 0
    node = Node(1 if 2 * pos > n else 0)
    if pos == 0 or pos == n:
        return node
    Xf = X.astype(np.float64)
    n_high = Xf.sum(axis=0)
    pos_high = Xf.T @ y.astype(np.float64)
    n_low = n - n_high
    pos_low = pos - pos_high
    splittable = (n_high > 0) & (n_low > 0)
    if not splittable.any():
        return node  # identical feature rows with mixed labels
    weighted = (n_high * _gini(pos_high, n_high) + n_low * _gini(pos_low, n_low)) / n
    weighted[~splittable] = np.inf
    best = float(weighted.min())
    # lowest feature index among (numerically) tied best splits
    feat = int(np.flatnonzero(weighted <= best + 1e-12)[0])
    hi = X[:, feat] == 1
    node.feature = feat
    node.low = _grow(X[~hi], y[~hi])
    node.high = _grow(X[hi], y[hi])
    return node


class DecisionTree:
    def __init__(self):
        self.root: Node | None = None

    def fit(self, X, y) -> "DecisionTree":
        X = np.asarray(X, dtype=np.uint8)
        y = np.asarray(y, dtype=np.uint8)
        if len(y) == 0:
            raise ValueError("cannot fit on an empty dataset")
        self.root = _grow(X, y)
        return self

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.uint8)
        out = np.empty(len(X), dtype=np.uint8)
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.high if row[node.feature] else node.low
            out[i] = node.prediction
        return out


def train_decision_tree(d: Dataset) -> DecisionTree:
    if len(d) == 0 or len(np.unique(d.y)) < 2:
        raise ValueError("decision tree needs a non-empty dataset with both labels")
    return DecisionTree().fit(d.X, d.y)
