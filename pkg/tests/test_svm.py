import numpy as np
import pytest
from cvxopt import matrix, solvers

from ssgk import TrainingError, svm_train
from ssgk.svm import svm_train_binary

solvers.options["show_progress"] = False


def qp_dual(K, y, C):
    """Reference dual optimum from a generic QP solver."""
    n = len(y)
    P = matrix(np.outer(y, y) * K)
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), np.full(n, C)]))
    A = matrix(y.reshape(1, -1).astype(float))
    sol = solvers.qp(P, q, G, h, A, matrix(0.0), options={"abstol": 1e-12, "reltol": 1e-12,
                                                          "feastol": 1e-12})
    return sol["primal objective"]


def random_problem(seed, n=10, dim=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[:2] = [-1.0, 1.0]
    return X @ X.T, y


def test_separable_toy_problem():
    x = np.array([-2.0, -1.0, 1.0, 2.0])
    y = np.array([-1.0, -1.0, 1.0, 1.0])
    m = svm_train_binary(np.outer(x, x), y, C=10.0)
    # maximum margin: w = 1, b = 0, support vectors at +-1 with alpha = 1/2
    assert np.allclose(m.alpha, [0, 0.5, 0.5, 0], atol=1e-3)
    assert m.bias == pytest.approx(0.0, abs=1e-3)
    assert m.predict(np.outer([-0.5, 3.0], x)).tolist() == [-1, 1]
    assert m.support.tolist() == [1, 2]


@pytest.mark.parametrize("seed", range(10))
def test_dual_objective_matches_qp(seed):
    K, y = random_problem(seed)
    m = svm_train_binary(K, y, C=1.0, tol=1e-6)
    assert m.objective == pytest.approx(qp_dual(K, y, 1.0), abs=1e-4)
    # objective is recomputed from alpha, not trusted from the solver's bookkeeping
    a = m.alpha
    assert m.objective == pytest.approx(0.5 * (a * y) @ K @ (a * y) - a.sum(), abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_kkt_conditions(seed):
    K, y = random_problem(100 + seed, n=30)
    m = svm_train_binary(K, y, C=0.5, tol=1e-5)
    a = m.alpha
    assert np.all(a >= 0) and np.all(a <= 0.5)
    assert abs(a @ y) < 1e-10
    margin = y * m.decision(K)
    free = (a > 1e-8) & (a < 0.5 - 1e-8)
    assert np.allclose(margin[free], 1.0, atol=1e-3)
    assert np.all(margin[a <= 1e-8] >= 1 - 1e-3)
    assert np.all(margin[a >= 0.5 - 1e-8] <= 1 + 1e-3)


def test_multiclass_one_vs_rest():
    rng = np.random.default_rng(0)
    centers = np.array([[0, 0], [6, 0], [0, 6]])
    labels = np.repeat([3, 5, 7], 15)
    X = centers[np.repeat([0, 1, 2], 15)] + rng.normal(scale=0.5, size=(45, 2))
    X1 = np.hstack([X, np.ones((45, 1))])
    model = svm_train(X1 @ X1.T, labels, C=10.0)
    assert model.classes.tolist() == [3, 5, 7]
    assert len(model.models) == 3
    assert np.mean(model.predict(X1 @ X1.T) == labels) == 1.0


def test_two_class_labels_are_mapped():
    x = np.array([-2.0, -1.0, 1.0, 2.0])
    model = svm_train(np.outer(x, x), np.array([0, 0, 4, 4]), C=10.0)
    assert model.predict(np.outer([-3.0, 3.0], x)).tolist() == [0, 4]


def test_errors():
    K = np.eye(3)
    with pytest.raises(TrainingError):
        svm_train(K, [1, 1, 1])
    with pytest.raises(TrainingError):
        svm_train_binary(K, [1, 1, 1])
    with pytest.raises(ValueError):
        svm_train_binary(K, [0, 1, 1])
    with pytest.raises(ValueError):
        svm_train_binary(K, [-1, 1, 1], C=0)
    with pytest.raises(ValueError):
        svm_train_binary(np.eye(2), [-1, 1, 1])
