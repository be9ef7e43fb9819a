import math

import numpy as np
import pytest

from boolearn.dataset import (Dataset, DatasetFormatError, PositivesUnavailable, TooFewNegatives, build_dataset,
                              gen_negative, gen_positive, mislabeled_rows, read_csv, write_csv)
from boolearn.encoders import constrainedness_grid, random_3cnf
from boolearn.formula import CnfFormula, evaluate
from boolearn.solver import count_models
from oracles import model_set

UNSAT = CnfFormula(2, ((1,), (-1,)))


def test_positive_unsat():
    with pytest.raises(PositivesUnavailable):
        gen_positive(UNSAT, 10, 0)


def test_positive_small_model_set_used_once():
    # x1..x3 with x1 -> x2 style constraints: 7 models over 3 vars
    f = CnfFormula(3, ((1, 2, 3),))
    assert len(model_set(3, f.clauses)) == 7
    X, mode, count = gen_positive(f, 500, 1)
    assert count == 7 and len(X) == 7
    assert {tuple(r) for r in X} == model_set(3, f.clauses)
    assert all(evaluate(f, r) for r in X)


def test_negative_unsat_accepts_everything():
    X = gen_negative(UNSAT, 50, 0)
    assert X.shape == (50, 2)


def test_negative_tautology_fails():
    with pytest.raises(TooFewNegatives):
        gen_negative(CnfFormula(3, ()), 5, 0, max_tries=1000)


def test_negative_rejection_rate_matches_count():
    # pick the on-phase v=20 formula with the most models among a few seeds
    v = 20
    m = constrainedness_grid(v)[5].clause_count
    f = max((random_3cnf(v, m, s) for s in range(12)), key=count_models)
    c = count_models(f)
    trials = 100_000
    with pytest.raises(TooFewNegatives) as e:
        gen_negative(f, trials, 7, max_tries=trials)
    rejected = trials - e.value.found
    p = c / 2**v
    assert abs(rejected - trials * p) <= 3 * math.sqrt(trials * p * (1 - p)) + 1


def test_build_dataset_labels_and_determinism():
    f = random_3cnf(20, 91, 3)
    d = build_dataset(f, 500, 500, seed=3)
    n_pos = int(d.provenance["positives"])
    assert len(d) == n_pos + 500 and int(d.y.sum()) == n_pos
    assert 0 < n_pos <= 500
    assert mislabeled_rows(f, d).size == 0
    assert write_csv(build_dataset(f, 500, 500, seed=3)) == write_csv(d)
    assert write_csv(build_dataset(f, 500, 500, seed=4)) != write_csv(d)


def test_build_dataset_is_shuffled_permutation():
    f = random_3cnf(12, 30, 1)
    d = build_dataset(f, 40, 40, seed=2)
    assert not np.array_equal(d.y, np.sort(d.y)[::-1])  # positives are not all in front
    # the multiset of rows equals positives + negatives before shuffling
    rows = sorted(map(tuple, np.column_stack([d.X, d.y])))
    d2 = build_dataset(f, 40, 40, seed=2)
    assert rows == sorted(map(tuple, np.column_stack([d2.X, d2.y])))


def test_build_dataset_unsat_propagates():
    with pytest.raises(PositivesUnavailable):
        build_dataset(UNSAT, 5, 5, seed=0)


def test_csv_minimal():
    assert write_csv(Dataset(1, [[1]], [1])) == "x1,y\n1,1\n"


def test_csv_provenance_lines():
    d = Dataset(2, [[0, 1]], [0], {"seed": "4", "sampler_mode": "uniform"})
    text = write_csv(d)
    assert text.startswith("# seed=4\n# sampler_mode=uniform\nx1,x2,y\n")
    assert read_csv(text) == d


@pytest.mark.parametrize("seed", range(50))
def test_csv_round_trip(seed):
    f = random_3cnf(6 + seed % 10, 10 + seed % 25, seed)
    try:
        d = build_dataset(f, 30, 30, seed=seed)
    except PositivesUnavailable:
        d = Dataset(f.num_vars, np.zeros((1, f.num_vars)), [0], {"formula_id": str(seed)})
    assert read_csv(write_csv(d)) == d


@pytest.mark.parametrize("text,needle", [
    ("x1,y\n1,1,0\n", "row 1"),
    ("x1,y\n1,1\n0\n", "row 2"),
    ("x1,y\n1,2\n", "row 1"),
    ("x2,y\n1,1\n", "header"),
    ("", "header"),
])
def test_csv_errors(text, needle):
    with pytest.raises(DatasetFormatError, match=needle):
        read_csv(text)
