"""C-SVM on a precomputed kernel, trained by SMO.

The solver works on the dual

    min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij

picking the maximal-violating pair with second-order information for the
second index (the rule LIBSVM uses) and stopping when the KKT gap
``max_{I_up} -y G - min_{I_low} -y G`` falls below ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .errors import TrainingError

TAU = 1e-12
MAX_EPOCHS = 10_000


@njit
def _smo(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    QD = np.empty(n)
    for t in range(n):
        QD[t] = K[t, t]
    it = 0
    gap = np.inf
    while it < max_iter:
        # first index: maximal -y G over I_up
        gmax = -np.inf
        i = -1
        for t in range(n):
            if y[t] > 0:
                if alpha[t] < C and -G[t] >= gmax:
                    gmax = -G[t]
                    i = t
            else:
                if alpha[t] > 0 and G[t] >= gmax:
                    gmax = G[t]
                    i = t
        gmax2 = -np.inf
        j = -1
        best = np.inf
        for t in range(n):
            if y[t] > 0:
                if alpha[t] > 0:
                    diff = gmax + G[t]
                    if G[t] >= gmax2:
                        gmax2 = G[t]
                    if diff > 0 and i >= 0:
                        quad = QD[i] + QD[t] - 2.0 * K[i, t]
                        obj = -(diff * diff) / (quad if quad > 0 else TAU)
                        if obj <= best:
                            best = obj
                            j = t
            else:
                if alpha[t] < C:
                    diff = gmax - G[t]
                    if -G[t] >= gmax2:
                        gmax2 = -G[t]
                    if diff > 0 and i >= 0:
                        quad = QD[i] + QD[t] - 2.0 * K[i, t]
                        obj = -(diff * diff) / (quad if quad > 0 else TAU)
                        if obj <= best:
                            best = obj
                            j = t
        gap = gmax + gmax2
        if gap < tol or j < 0:
            break

        qij = y[i] * y[j] * K[i, j]
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = QD[i] + QD[j] + 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = QD[i] + QD[j] - 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            s = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if s > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = s - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = s
            if s > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = s - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = s
        di = alpha[i] - ai
        dj = alpha[j] - aj
        for t in range(n):
            G[t] += y[t] * (y[i] * K[t, i] * di + y[j] * K[t, j] * dj)
        it += 1

    # bias from free vectors, else the midpoint of the feasible interval
    ub = np.inf
    lb = -np.inf
    n_free = 0
    s_free = 0.0
    for t in range(n):
        yg = y[t] * G[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            s_free += yg
    rho = s_free / n_free if n_free > 0 else (ub + lb) / 2.0
    obj = 0.0
    for t in range(n):
        obj += alpha[t] * (G[t] - 1.0)
    return alpha, -rho, obj / 2.0, gap, it


@dataclass
class SvmModel:
    """Binary model; ``alpha`` are the dual variables, ``y`` the +-1 targets."""
    alpha: np.ndarray
    y: np.ndarray
    bias: float
    C: float
    objective: float
    kkt_gap: float
    iterations: int

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alpha > 0)

    @property
    def dual_coef(self) -> np.ndarray:
        return self.alpha * self.y

    def decision(self, K_test) -> np.ndarray:
        """Scores for rows of ``K_test`` (test x train kernel values)."""
        return np.asarray(K_test) @ self.dual_coef + self.bias

    def predict(self, K_test) -> np.ndarray:
        return np.where(self.decision(K_test) > 0, 1, -1)


def svm_train_binary(K, y, C: float = 1.0, tol: float = 1e-3,
                     max_epochs: int = MAX_EPOCHS) -> SvmModel:
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != y.shape[0]:
        raise ValueError("kernel must be square and match the label count")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    if np.all(y == y[0]):
        raise TrainingError("training set contains a single class")
    if not C > 0:
        raise ValueError("C must be positive")
    n = y.shape[0]
    alpha, b, obj, gap, it = _smo(K, y, float(C), float(tol), int(max_epochs) * n)
    return SvmModel(alpha, y, float(b), float(C), float(obj), float(gap), int(it))


@dataclass
class MulticlassSvm:
    """One-vs-rest wrapper; a two-class problem uses a single machine."""
    classes: np.ndarray
    models: list

    def decision(self, K_test) -> np.ndarray:
        return np.column_stack([m.decision(K_test) for m in self.models])

    def predict(self, K_test) -> np.ndarray:
        if len(self.classes) == 2:
            return np.where(self.models[0].decision(K_test) > 0, self.classes[1], self.classes[0])
        return self.classes[np.argmax(self.decision(K_test), axis=1)]


def svm_train(K, labels, C: float = 1.0, tol: float = 1e-3) -> MulticlassSvm:
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size < 2:
        raise TrainingError("training set contains a single class")
    if classes.size == 2:
        y = np.where(labels == classes[1], 1.0, -1.0)
        return MulticlassSvm(classes, [svm_train_binary(K, y, C, tol)])
    models = [svm_train_binary(K, np.where(labels == c, 1.0, -1.0), C, tol) for c in classes]
    return MulticlassSvm(classes, models)
