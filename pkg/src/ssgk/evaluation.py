"""Cross-validated classification accuracy, discount/size sweeps and t-tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .catalog import GraphletCatalog, GraphletDag
from .graph import GraphCollection
from .kernel import FeatureConfig, KernelMatrix, collection_counts, gram_from_features, \
    smooth_collection
from .smoothing import DISCOUNT_GRID
from .svm import svm_train


@dataclass
class EvalReport:
    accuracies: list  # percent, one per fold
    config: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))

    @property
    def folds(self) -> int:
        return len(self.accuracies)

    def result_line(self, dataset: str = "") -> str:
        c = self.config
        return (f"RESULT dataset={dataset or c.get('dataset', '')} k={c.get('k', '')} "
                f"method={c.get('method', '')} d={c.get('d', '')} "
                f"mean={self.mean:.2f} std={self.std:.2f}")

    def __str__(self):
        folds = " ".join(f"{a:.2f}" for a in self.accuracies)
        return f"{self.mean:.2f} +- {self.std:.2f} (folds: {folds})"


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample; each class is shuffled and dealt round-robin."""
    labels = np.asarray(labels)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    fold = np.empty(labels.shape[0], dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < folds:
            raise ValueError(f"class {c} has {idx.size} graphs, fewer than {folds} folds")
        idx = rng.permutation(idx)
        # continue dealing where the previous class stopped to balance fold sizes
        fold[idx] = (np.arange(idx.size) + offset) % folds
        offset = (offset + idx.size) % folds
    return fold


def cross_validate_gram(gram: KernelMatrix | np.ndarray, labels, folds: int = 5, seed: int = 0,
                        C: float = 1.0, config: dict | None = None) -> EvalReport:
    K = gram.values if isinstance(gram, KernelMatrix) else np.asarray(gram, dtype=np.float64)
    labels = np.asarray(labels)
    assign = stratified_folds(labels, folds, seed)
    acc = []
    for f in range(folds):
        test = assign == f
        train = ~test
        model = svm_train(K[np.ix_(train, train)], labels[train], C)
        pred = model.predict(K[np.ix_(test, train)])
        acc.append(100.0 * float(np.mean(pred == labels[test])))
    cfg = dict(config or {})
    cfg.update(folds=folds, cv_seed=seed, C=C)
    return EvalReport(acc, cfg)


def cross_validate(collection: GraphCollection, catalog: GraphletCatalog, dag: GraphletDag,
                   config: FeatureConfig, folds: int = 5, seed: int = 0, C: float = 1.0,
                   workers: int | None = None) -> EvalReport:
    """Count, smooth, build the Gram matrix and score it by stratified CV.

    Feature vectors depend only on their own graph, so they are computed
    once and the folds index into one Gram matrix.
    """
    counts = collection_counts(collection, catalog, config, workers)
    F = smooth_collection(counts, dag, config.smoothing, config.k, config.seed, workers)
    return cross_validate_gram(gram_from_features(F), collection.labels, folds, seed, C,
                               _echo(collection, config))


def _echo(collection, config: FeatureConfig) -> dict:
    s = config.smoothing
    return {"dataset": collection.name, "k": config.k, "method": s.method,
            "d": s.d if s.method in ("kn", "skn") else "", "samples": config.samples,
            "sampling": config.sampling, "seed": config.seed}


def discount_sweep(collection: GraphCollection, catalog: GraphletCatalog, dag: GraphletDag,
                   config: FeatureConfig, grid=DISCOUNT_GRID, folds: int = 5, seed: int = 0,
                   C: float = 1.0, workers: int | None = None) -> list[tuple[float, EvalReport]]:
    """One CV run per discount; counts are drawn once and reused for every ``d``."""
    counts = collection_counts(collection, catalog, config, workers)
    out = []
    for d in grid:
        cfg = replace(config, smoothing=config.smoothing.with_d(d))
        F = smooth_collection(counts, dag, cfg.smoothing, cfg.k, cfg.seed, workers)
        out.append((float(d), cross_validate_gram(gram_from_features(F), collection.labels,
                                                  folds, seed, C, _echo(collection, cfg))))
    return out


def best_on_grid(rows: list[tuple[float, EvalReport]]) -> tuple[float, EvalReport]:
    """Row with the highest mean test accuracy (ties: smallest d).

    The selection looks at test folds, so the number is optimistic.
    """
    return max(rows, key=lambda r: (r[1].mean, -r[0]))


def size_sweep(collection: GraphCollection, catalog: GraphletCatalog, dag: GraphletDag,
               config: FeatureConfig, ks, folds: int = 5, seed: int = 0, C: float = 1.0,
               workers: int | None = None) -> list[tuple[int, EvalReport]]:
    return [(k, cross_validate(collection, catalog, dag, replace(config, k=k), folds, seed, C,
                               workers)) for k in ks]


def diagonal_ratio(gram: KernelMatrix | np.ndarray) -> float:
    """Mean of ``K[a, b] / sqrt(K[a, a] K[b, b])`` over ``a != b``."""
    K = gram.values if isinstance(gram, KernelMatrix) else np.asarray(gram)
    d = np.sqrt(np.diag(K))
    R = K / np.outer(d, d)
    n = K.shape[0]
    return float((R.sum() - np.trace(R)) / (n * (n - 1)))


def t_test(a, b) -> float:
    """Two-sided unpaired Welch t-test p-value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two values")
    if a.var() == 0 and b.var() == 0:
        return 1.0 if a.mean() == b.mean() else 0.0
    p = float(stats.ttest_ind(a, b, equal_var=False).pvalue)
    return 1.0 if math.isnan(p) else p
