"""Networks, decision-tree baseline and cross-validated learnability measures."""

from .cv import (SWEEP_SIZES, CvReport, SweepResult, cross_validate, cross_validate_tree, fold_indices,
                 neuron_sweep)
from .mlp import MlpConfig, TrainedModel, predict, train_mlp
from .tree import DecisionTree, train_decision_tree

__all__ = [
    "SWEEP_SIZES", "CvReport", "DecisionTree", "MlpConfig", "SweepResult", "TrainedModel",
    "cross_validate", "cross_validate_tree", "fold_indices", "neuron_sweep", "predict",
    "train_decision_tree", "train_mlp",
]
