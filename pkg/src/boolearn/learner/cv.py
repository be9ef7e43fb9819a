"""k-fold cross-validation and the hidden-width sweep."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset
from .mlp import MlpConfig, fit_stack
from .tree import DecisionTree

SWEEP_SIZES = (1, 2, 4, 8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class CvReport:
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    min_accuracy: float
    perfect: bool

    @classmethod
    def from_folds(cls, accs) -> "CvReport":
        accs = tuple(float(a) for a in accs)
        return cls(accs, float(np.mean(accs)), min(accs), all(a == 1.0 for a in accs))

    def csv_header(self) -> str:
        return ",".join([f"fold{i + 1}" for i in range(len(self.fold_accuracies))]
                        + ["mean_acc", "min_acc", "perfect"])

    def csv_line(self) -> str:
        return ",".join([f"{a:.6f}" for a in self.fold_accuracies]
                        + [f"{self.mean_accuracy:.6f}", f"{self.min_accuracy:.6f}", str(int(self.perfect))])


@dataclass
class SweepResult:
    min_neurons: int | None  # None: not learned with the largest width
    reports: dict[int, CvReport] = field(default_factory=dict)

    @property
    def learned(self) -> bool:
        return self.min_neurons is not None

    @property
    def final_report(self) -> CvReport:
        return self.reports[max(self.reports)]


def fold_indices(n: int, k: int) -> list[np.ndarray]:
    """Contiguous blocks in stored order, sizes differing by at most one."""
    if n < k:
        raise ValueError(f"dataset of {n} rows is smaller than k={k}")
    return np.array_split(np.arange(n), k)


def _splits(d: Dataset, k: int):
    folds = fold_indices(len(d), k)
    for i, test in enumerate(folds):
        train = np.concatenate([f for j, f in enumerate(folds) if j != i])
        yield train, test


def cross_validate(d: Dataset, cfg: MlpConfig, k: int = 5) -> CvReport:
    """Train the k fold networks side by side; fold i's network uses stream i of cfg.seed.

    A training split holding a single class is trained as-is (the network then
    predicts that class everywhere).
    """
    splits = list(_splits(d, k))
    models = fit_stack([d.X[tr] for tr, _ in splits], [d.y[tr] for tr, _ in splits], cfg, range(k))
    accs = [float(np.mean(m.predict_many(d.X[te]) == d.y[te])) for m, (_, te) in zip(models, splits)]
    return CvReport.from_folds(accs)


def cross_validate_tree(d: Dataset, k: int = 5) -> CvReport:
    accs = []
    for tr, te in _splits(d, k):
        tree = DecisionTree().fit(d.X[tr], d.y[tr])
        accs.append(float(np.mean(tree.predict_many(d.X[te]) == d.y[te])))
    return CvReport.from_folds(accs)


def neuron_sweep(d: Dataset, activation: str = "relu", base: MlpConfig | None = None,
                 sizes=SWEEP_SIZES, k: int = 5) -> SweepResult:
    """Single hidden layer of width 1, 2, 4, ..., 256; stop at the first perfect fit."""
    base = base or MlpConfig()
    result = SweepResult(None)
    for size in sizes:
        rep = cross_validate(d, base.with_(hidden_layers=(size,), activation=activation), k)
        result.reports[size] = rep
        if rep.perfect:
            result.min_neurons = size
            break
    return result
