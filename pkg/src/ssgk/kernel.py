"""Graphlet feature vectors, Gram matrices and the precomputed-kernel text format."""

from __future__ import annotations

import concurrent.futures as cf
import os
from dataclasses import dataclass, field

import numpy as np

from .catalog import GraphletCatalog, GraphletDag
from .errors import GraphFormatError
from .graph import Graph, GraphCollection
from .sampling import SAMPLING_METHODS, codes_to_counts, count_collection, enumerate_subgraphs, \
    graph_rng, sample_raw_codes
from .smoothing import SmoothingConfig, smooth
from .vectors import CountVector, Distribution


@dataclass(frozen=True)
class FeatureConfig:
    """How a graph becomes a vector: level, count source, smoothing.

    ``samples=None`` counts exhaustively. ``seed`` drives both sampling and
    the PYP chains.
    """
    k: int = 5
    samples: int | None = 10_000
    sampling: str = "expand"
    seed: int = 0
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)

    def __post_init__(self):
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1 (or None for exhaustive counting)")
        if self.sampling not in SAMPLING_METHODS:
            raise ValueError(f"sampling must be one of {SAMPLING_METHODS}")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.smoothing.needs_lower_level and self.k < 3:
            raise ValueError(f"{self.smoothing.method} needs k >= 3")
        if self.smoothing.method == "pyp" and not 2 <= self.smoothing.base_level < self.k:
            raise ValueError("the PYP base level must lie in 2..k-1")

    @property
    def levels(self) -> tuple[int, ...]:
        s = self.smoothing
        if s.method == "skn":
            return (self.k - 1, self.k)
        if s.method == "pyp":
            return (s.base_level, self.k)
        return (self.k,)


@dataclass
class KernelMatrix:
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("kernel matrix must be square")
        if not np.allclose(v, v.T, rtol=0, atol=1e-12):
            raise ValueError("kernel matrix must be symmetric")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _count_one(g: Graph, index: int, level: int, catalog, config: FeatureConfig) -> CountVector:
    if config.samples is None:
        return enumerate_subgraphs(g, level, catalog)
    raw = sample_raw_codes(g, level, config.samples, graph_rng(config.seed, index, level),
                           config.sampling)
    uniq, cnt = np.unique(raw, return_counts=True)
    return codes_to_counts(uniq, level, catalog, weights=cnt)


def pyp_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)]).generate_state(1)[0])


def feature_vector(g: Graph, catalog: GraphletCatalog, dag: GraphletDag,
                   config: FeatureConfig, index: int = 0) -> Distribution:
    """Smoothed level-``k`` graphlet distribution of one graph.

    ``index`` is the graph's position in its collection; it selects the
    random streams so that a graph gets the same vector alone or in bulk.
    """
    counts = {m: _count_one(g, index, m, catalog, config) for m in config.levels}
    lower = next((counts[m] for m in config.levels if m != config.k), None)
    return smooth(counts[config.k], dag, config.smoothing, lower=lower,
                  seed=pyp_seed(config.seed, index))


def collection_counts(collection: GraphCollection, catalog: GraphletCatalog,
                      config: FeatureConfig, workers: int | None = None) -> dict[int, list[CountVector]]:
    return {m: count_collection(collection, m, catalog, samples=config.samples, seed=config.seed,
                                method=config.sampling, workers=workers)
            for m in config.levels}


def smooth_collection(counts: dict[int, list[CountVector]], dag: GraphletDag,
                      smoothing: SmoothingConfig, k: int, seed: int = 0,
                      workers: int | None = None) -> np.ndarray:
    """Rows of smoothed distributions, one per graph, ordered by catalog ordinal."""
    top = counts[k]
    lower_level = next((m for m in counts if m != k), None)

    def one(i):
        lower = counts[lower_level][i] if lower_level is not None else None
        return smooth(top[i], dag, smoothing, lower=lower, seed=pyp_seed(seed, i)).probs

    workers = workers or os.cpu_count() or 1
    if workers == 1 or smoothing.method != "pyp":
        rows = [one(i) for i in range(len(top))]
    else:
        with cf.ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(one, range(len(top))))
    return np.vstack(rows) if rows else np.zeros((0, dag.catalog.size(k)))


def gram_from_features(features, meta: dict | None = None) -> KernelMatrix:
    """``K[a, b] = f_a . f_b``; symmetrised to cancel floating-point asymmetry."""
    F = np.asarray(features, dtype=np.float64)
    K = F @ F.T
    K = (K + K.T) / 2.0
    return KernelMatrix(K, dict(meta or {}))


def feature_matrix(collection: GraphCollection, catalog: GraphletCatalog, dag: GraphletDag,
                   config: FeatureConfig, workers: int | None = None) -> np.ndarray:
    counts = collection_counts(collection, catalog, config, workers)
    return smooth_collection(counts, dag, config.smoothing, config.k, config.seed, workers)


def gram_matrix(collection: GraphCollection, catalog: GraphletCatalog, dag: GraphletDag,
                config: FeatureConfig, workers: int | None = None) -> KernelMatrix:
    F = feature_matrix(collection, catalog, dag, config, workers)
    s = config.smoothing
    meta = {"k": config.k, "method": s.method, "d": s.d, "samples": config.samples,
            "sampling": config.sampling, "seed": config.seed}
    return gram_from_features(F, meta)


def export_precomputed_kernel(gram: KernelMatrix | np.ndarray, labels, path) -> None:
    """Write ``<label> 0:<row+1> 1:<v1> ... n:<vn>`` per graph."""
    K = gram.values if isinstance(gram, KernelMatrix) else np.asarray(gram, dtype=np.float64)
    labels = np.asarray(labels)
    if labels.shape[0] != K.shape[0]:
        raise ValueError(f"{labels.shape[0]} labels for a {K.shape[0]}x{K.shape[0]} kernel")
    with open(path, "w", encoding="utf-8") as fh:
        for r in range(K.shape[0]):
            vals = " ".join(f"{c + 1}:{K[r, c]:.17g}" for c in range(K.shape[1]))
            fh.write(f"{labels[r]} 0:{r + 1} {vals}\n")


def import_precomputed_kernel(path) -> tuple[np.ndarray, np.ndarray]:
    rows, labels = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            try:
                labels.append(int(parts[0]))
                idx, serial = parts[1].split(":")
                if idx != "0" or int(serial) != len(rows) + 1:
                    raise ValueError
                vals = []
                for c, tok in enumerate(parts[2:], 1):
                    i, v = tok.split(":")
                    if int(i) != c:
                        raise ValueError
                    vals.append(float(v))
            except (ValueError, IndexError):
                raise GraphFormatError(f"{path}:{lineno}: malformed precomputed-kernel line") from None
            rows.append(vals)
    if any(len(r) != len(rows) for r in rows):
        raise GraphFormatError(f"{path}: kernel is not square")
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(rows)), np.array(labels)
