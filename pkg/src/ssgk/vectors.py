"""Per-level count and probability vectors, plus their sparse text format.

One line per (graph, level)::

    <graph idx> <level> <ordinal>:<value> <ordinal>:<value> ...

Entries are sparse (zeros omitted) and in ascending ordinal order. Counts
are written as integers, probabilities with 17 significant digits so that
a read-back is bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, GraphFormatError

SUM_TOL = 1e-9


@dataclass(frozen=True)
class CountVector:
    level: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        if c.size and c.min() < 0:
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __len__(self):
        return self.counts.shape[0]

    def __add__(self, other: "CountVector") -> "CountVector":
        if other.level != self.level or len(other) != len(self):
            raise ValueError("cannot add count vectors of different levels")
        return CountVector(self.level, self.counts + other.counts)


@dataclass(frozen=True)
class Distribution:
    level: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty vector")
        if p.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.shape[0]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)


def normalize_counts(counts: CountVector) -> Distribution:
    total = counts.total
    if total <= 0:
        raise EstimationError(f"level-{counts.level} counts have zero total")
    return Distribution(counts.level, counts.counts / total)


def _format_line(graph_idx, level, values, real):
    nz = np.flatnonzero(values)
    if real:
        body = " ".join(f"{i}:{values[i]:.17g}" for i in nz.tolist())
    else:
        body = " ".join(f"{i}:{int(values[i])}" for i in nz.tolist())
    head = f"{graph_idx} {level}"
    return f"{head} {body}" if body else head


def write_vectors(path, rows, sizes, real=False, meta=None):
    """Write ``rows`` = iterable of ``(graph_idx, level, vector)``.

    The first line is a header ``# sizes <level>:<n> ...`` recording the
    catalog level sizes so that readers can restore dense vectors. An
    optional ``# meta key=value ...`` line follows (values without spaces).
    """
    rows = list(rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# sizes " + " ".join(f"{k}:{n}" for k, n in sorted(sizes.items())) + "\n")
        if meta:
            fh.write("# meta " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        for gi, level, vec in rows:
            fh.write(_format_line(gi, level, np.asarray(vec), real) + "\n")


def read_vectors(path, real=False, with_meta=False):
    """Inverse of :func:`write_vectors`.

    Returns ``{(graph_idx, level): ndarray}`` and the level-size map, plus
    the meta dictionary when ``with_meta`` is set.
    """
    sizes: dict[int, int] = {}
    meta: dict[str, str] = {}
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# sizes"):
        raise GraphFormatError(f"{path}: missing '# sizes' header")
    try:
        for tok in lines[0].split()[2:]:
            k, n = tok.split(":")
            sizes[int(k)] = int(n)
    except ValueError:
        raise GraphFormatError(f"{path}:1: malformed sizes header") from None
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.startswith("# meta"):
                for tok in line.split()[2:]:
                    key, _, val = tok.partition("=")
                    meta[key] = val
            continue
        parts = line.split()
        try:
            gi, level = int(parts[0]), int(parts[1])
            n = sizes[level]
            vec = np.zeros(n, dtype=np.float64 if real else np.int64)
            for tok in parts[2:]:
                i, v = tok.split(":")
                vec[int(i)] = float(v) if real else int(v)
        except (ValueError, KeyError, IndexError):
            raise GraphFormatError(f"{path}:{lineno}: malformed vector line") from None
        out[(gi, level)] = vec
    if with_meta:
        return out, sizes, meta
    return out, sizes
