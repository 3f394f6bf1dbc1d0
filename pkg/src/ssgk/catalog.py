"""Graphlet catalog and the delete-one-node DAG between consecutive sizes.

Level ``k`` holds every connected graph on ``k`` vertices, identified by its
canonical code and numbered by ascending code. The DAG links a size-``k``
graphlet ``g_i`` to a size-``k+1`` graphlet ``g_j`` when deleting one vertex
of ``g_j`` leaves a (connected) copy of ``g_i``; ``s_ij`` counts such
vertices and ``w_ij = s_ij / sum_j' s_ij'`` normalises over the children
of ``g_i``.

The ``"all"`` universe keeps disconnected graphs as well: level ``k`` is
then every graph on ``k`` vertices and every single-vertex deletion is an
edge of the DAG. This is what a sampler drawing plain random k-subsets of
vertices observes.
"""

from __future__ import annotations

import functools
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import canonical
from ._jit import njit
from .canonical import BITPOS, CanonicalCode, canonicalize_many
from .errors import EstimationError, GraphFormatError
from .vectors import CountVector, Distribution, normalize_counts

log = logging.getLogger(__name__)

MIN_KMAX = 3
MAX_KMAX = canonical.MAX_K
BASE_MODES = ("parent-mle", "recursive")
UNIVERSES = ("connected", "all")
CACHE_ENV = "SSGK_CACHE_DIR"
FORMAT_HEADER = "graphlet-catalog v1"


@njit
def _extend_codes(parents, k, pos_k, pos_k1, first):
    """Raw size-(k+1) codes: each parent plus a new vertex ``k`` joined to
    every subset ``first..2^k-1`` of the parent's vertices (``first=1``
    skips the isolated vertex)."""
    nsub = (1 << k) - first
    out = np.empty(parents.shape[0] * nsub, dtype=np.int64)
    for p in range(parents.shape[0]):
        code = parents[p]
        base = 0
        for i in range(k):
            for j in range(i + 1, k):
                if (code >> pos_k[i, j]) & 1:
                    base |= 1 << pos_k1[i, j]
        for s in range(first, 1 << k):
            c = base
            for i in range(k):
                if (s >> i) & 1:
                    c |= 1 << pos_k1[i, k]
            out[p * nsub + s - first] = c
    return out


@njit
def _is_connected_code(code, k, pos):
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in range(k):
            if (frontier >> v) & 1:
                for u in range(k):
                    if u != v and not (seen >> u) & 1 and (code >> pos[v, u]) & 1:
                        nxt |= 1 << u
        seen |= nxt
        frontier = nxt
    return seen == (1 << k) - 1


@njit
def _connected_mask(codes, k, pos):
    out = np.empty(codes.shape[0], dtype=np.bool_)
    for i in range(codes.shape[0]):
        out[i] = _is_connected_code(codes[i], k, pos)
    return out


@njit
def _deletion_codes(children, k1, pos_k1, pos_k):
    """For each child (size k1) and vertex v: raw size-(k1-1) code of the
    child minus v, and whether that remainder is connected."""
    k = k1 - 1
    n = children.shape[0]
    codes = np.empty((n, k1), dtype=np.int64)
    conn = np.empty((n, k1), dtype=np.bool_)
    for c in range(n):
        code = children[c]
        for v in range(k1):
            sub = 0
            for a in range(k1):
                if a == v:
                    continue
                ia = a if a < v else a - 1
                for b in range(a + 1, k1):
                    if b == v:
                        continue
                    ib = b if b < v else b - 1
                    if (code >> pos_k1[a, b]) & 1:
                        sub |= 1 << pos_k[ia, ib]
            codes[c, v] = sub
            conn[c, v] = _is_connected_code(sub, k, pos_k)
    return codes, conn


class GraphletCatalog:
    """Graphlets per size (connected only, or all graphs), ordered by ascending canonical code."""

    def __init__(self, levels: dict[int, np.ndarray], universe: str = "connected"):
        if universe not in UNIVERSES:
            raise ValueError(f"universe must be one of {UNIVERSES}, got {universe!r}")
        self.universe = universe
        self.levels = {int(k): np.asarray(v, dtype=np.int64) for k, v in sorted(levels.items())}
        for k, codes in self.levels.items():
            if codes.size and np.any(np.diff(codes) <= 0):
                raise ValueError(f"level {k} codes must be strictly increasing")
        self.kmax = max(self.levels)
        self.kmin = min(self.levels)
        self.index = {CanonicalCode(k, int(c)): (k, i)
                      for k, codes in self.levels.items() for i, c in enumerate(codes.tolist())}

    def size(self, k: int) -> int:
        return int(self.levels[k].shape[0])

    def sizes(self) -> dict[int, int]:
        return {k: self.size(k) for k in self.levels}

    def ordinal(self, k: int, bits: int) -> int:
        try:
            return self.index[CanonicalCode(k, int(bits))][1]
        except KeyError:
            raise ValueError(f"{k}:{int(bits):x} is not a level-{k} graphlet") from None

    def ordinals(self, k: int, canon_codes) -> np.ndarray:
        """Vectorised :meth:`ordinal` for canonical codes known to be in level ``k``."""
        codes = self.levels[k]
        canon_codes = np.asarray(canon_codes, dtype=np.int64)
        idx = np.searchsorted(codes, canon_codes)
        bad = (idx >= codes.size) | (codes[np.minimum(idx, codes.size - 1)] != canon_codes)
        if np.any(bad):
            raise ValueError(f"codes not in level {k}: {canon_codes[bad][:5]}")
        return idx

    def code(self, k: int, ordinal: int) -> CanonicalCode:
        return CanonicalCode(k, int(self.levels[k][ordinal]))

    def token(self, k: int, ordinal: int) -> str:
        return self.code(k, ordinal).token

    def graph(self, k: int, ordinal: int):
        return canonical.graph_from_code(int(self.levels[k][ordinal]), k)

    def __contains__(self, k):
        return k in self.levels

    def __eq__(self, other):
        if not isinstance(other, GraphletCatalog):
            return NotImplemented
        return (self.universe == other.universe and self.levels.keys() == other.levels.keys()
                and all(np.array_equal(self.levels[k], other.levels[k]) for k in self.levels))

    def __repr__(self):
        return f"GraphletCatalog({self.universe}, " + " ".join(f"{k}:{n}" for k, n in self.sizes().items()) + ")"


@dataclass
class LevelEdges:
    """DAG edges from level ``k`` to ``k + 1``, sorted by (parent, child)."""
    k: int
    parent: np.ndarray
    child: np.ndarray
    s: np.ndarray
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        self.parent = np.asarray(self.parent, dtype=np.int64)
        self.child = np.asarray(self.child, dtype=np.int64)
        self.s = np.asarray(self.s, dtype=np.int64)
        order = np.lexsort((self.child, self.parent))
        self.parent, self.child, self.s = self.parent[order], self.child[order], self.s[order]
        n_par = int(self.parent.max()) + 1 if self.parent.size else 0
        tot = np.bincount(self.parent, weights=self.s, minlength=n_par)
        self.w = self.s / tot[self.parent]


class GraphletDag:
    """Weighted parent -> child edges for every pair of consecutive levels."""

    def __init__(self, catalog: GraphletCatalog, edges: dict[int, LevelEdges]):
        self.catalog = catalog
        self.edges = edges
        self.prior_cache: dict[int, Distribution] = {}

    def covers(self, k: int) -> bool:
        return k in self.edges

    def transition(self, k: int) -> LevelEdges:
        if k not in self.edges:
            raise ValueError(f"DAG has no edges from level {k} to level {k + 1}")
        return self.edges[k]

    def children(self, k: int, i: int) -> list[tuple[int, int, float]]:
        e = self.transition(k)
        m = e.parent == i
        return list(zip(e.child[m].tolist(), e.s[m].tolist(), e.w[m].tolist()))

    def parents(self, k1: int, j: int) -> list[tuple[int, int, float]]:
        """Parents at level ``k1 - 1`` of child ``j`` at level ``k1``."""
        e = self.transition(k1 - 1)
        m = e.child == j
        return list(zip(e.parent[m].tolist(), e.s[m].tolist(), e.w[m].tolist()))

    def weight_matrix(self, k: int) -> np.ndarray:
        """Dense ``n_k x n_{k+1}`` matrix of ``w_ij``."""
        e = self.transition(k)
        m = np.zeros((self.catalog.size(k), self.catalog.size(k + 1)))
        m[e.parent, e.child] = e.w
        return m

    def __eq__(self, other):
        if not isinstance(other, GraphletDag):
            return NotImplemented
        if self.catalog != other.catalog or self.edges.keys() != other.edges.keys():
            return False
        for k, e in self.edges.items():
            o = other.edges[k]
            if not (np.array_equal(e.parent, o.parent) and np.array_equal(e.child, o.child)
                    and np.array_equal(e.s, o.s) and np.array_equal(e.w, o.w)):
                return False
        return True


def _check_kmax(kmax):
    if not isinstance(kmax, (int, np.integer)) or not MIN_KMAX <= kmax <= MAX_KMAX:
        raise ValueError(f"kmax must be an integer in {MIN_KMAX}..{MAX_KMAX}, got {kmax!r}")


def _check_universe(universe):
    if universe not in UNIVERSES:
        raise ValueError(f"universe must be one of {UNIVERSES}, got {universe!r}")


def extend_level(codes: np.ndarray, k: int, universe: str = "connected") -> np.ndarray:
    """All size-(k+1) canonical codes reachable by adding one vertex."""
    _check_universe(universe)
    first = 1 if universe == "connected" else 0
    raw = _extend_codes(np.asarray(codes, dtype=np.int64), k, BITPOS[k], BITPOS[k + 1], first)
    return np.unique(canonicalize_many(raw, k + 1))


def build_catalog(kmax: int, universe: str = "connected") -> GraphletCatalog:
    _check_kmax(kmax)
    _check_universe(universe)
    start = [1] if universe == "connected" else [0, 1]
    levels = {2: np.array(start, dtype=np.int64)}
    for k in range(2, kmax):
        levels[k + 1] = extend_level(levels[k], k, universe)
        log.debug("level %d: %d graphlets", k + 1, levels[k + 1].size)
    return GraphletCatalog(levels, universe)


def build_dag(catalog: GraphletCatalog) -> GraphletDag:
    if len(catalog.levels) < 2:
        raise ValueError("catalog needs at least two levels")
    edges = {}
    for k1 in range(catalog.kmin + 1, catalog.kmax + 1):
        k = k1 - 1
        children = catalog.levels[k1]
        sub, conn = _deletion_codes(children, k1, BITPOS[k1], BITPOS[k])
        child_idx = np.repeat(np.arange(children.size), k1).reshape(children.size, k1)
        if catalog.universe == "connected":
            sub, child_idx = sub[conn], child_idx[conn]
        else:
            sub, child_idx = sub.ravel(), child_idx.ravel()
        parent_idx = catalog.ordinals(k, canonicalize_many(sub, k))
        pairs, s = np.unique(np.stack([parent_idx, child_idx], axis=1), axis=0, return_counts=True)
        edges[k] = LevelEdges(k, pairs[:, 0], pairs[:, 1], s)
    return GraphletDag(catalog, edges)


def push_forward(dist: Distribution, dag: GraphletDag) -> Distribution:
    """Level-``k+1`` distribution ``P0(g_j) = sum_i w_ij P(g_i)``."""
    k = dist.level
    e = dag.transition(k)
    if len(dist) != dag.catalog.size(k):
        raise ValueError(f"distribution length {len(dist)} != level-{k} size {dag.catalog.size(k)}")
    out = np.bincount(e.child, weights=e.w * dist.probs[e.parent],
                      minlength=dag.catalog.size(k + 1))
    # no renormalisation: sum-to-one must follow from the child weights summing to one
    return Distribution(k + 1, out)


def structural_prior(dag: GraphletDag, level: int) -> Distribution:
    """Uniform distribution on the lowest level pushed forward to ``level``.

    For connected graphlets the lowest level is the single edge, so this is
    its point mass carried up the DAG.
    """
    cache = dag.prior_cache
    if level not in cache:
        kmin = dag.catalog.kmin
        dist = Distribution(kmin, np.full(dag.catalog.size(kmin), 1.0 / dag.catalog.size(kmin)))
        while dist.level < level:
            dist = push_forward(dist, dag)
            cache.setdefault(dist.level, dist)
    return cache[level]


def base_distribution(counts: CountVector, dag: GraphletDag, mode: str = "parent-mle") -> Distribution:
    """Level-``k+1`` base distribution from level-``k`` counts."""
    if mode not in BASE_MODES:
        raise ValueError(f"base mode must be one of {BASE_MODES}, got {mode!r}")
    if counts.total <= 0:
        raise EstimationError(f"level-{counts.level} counts have zero total")
    if mode == "parent-mle":
        return push_forward(normalize_counts(counts), dag)
    return structural_prior(dag, counts.level + 1)


# -- persistence -------------------------------------------------------------

def save_catalog(catalog: GraphletCatalog, dag: GraphletDag, path) -> None:
    lines = [f"{FORMAT_HEADER} kmax={catalog.kmax} universe={catalog.universe}"]
    n_graphlets = 0
    for k, codes in catalog.levels.items():
        for i, c in enumerate(codes.tolist()):
            lines.append(f"{k}:{c:x} {i}")
            n_graphlets += 1
    n_edges = 0
    for k, e in sorted(dag.edges.items()):
        pc, cc = catalog.levels[k], catalog.levels[k + 1]
        for p, c, s, w in zip(e.parent.tolist(), e.child.tolist(), e.s.tolist(), e.w.tolist()):
            lines.append(f"E {k}:{pc[p]:x} {cc[c]:x} {s} {w:.17g}")
            n_edges += 1
    lines.append(f"END {n_graphlets} {n_edges}")
    tmp = Path(str(path) + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def load_catalog(path) -> tuple[GraphletCatalog, GraphletDag]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise GraphFormatError(f"cannot read catalog {path}: {exc}") from None
    if not lines or not lines[0].startswith(FORMAT_HEADER + " "):
        raise GraphFormatError(f"{path}: not a '{FORMAT_HEADER}' file (wrong or missing header)")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
        kmax = int(fields["kmax"])
        universe = fields.get("universe", "connected")
        _check_universe(universe)
    except (KeyError, ValueError):
        raise GraphFormatError(f"{path}:1: malformed header") from None
    if not lines[-1].startswith("END "):
        raise GraphFormatError(f"{path}: truncated (no END record)")

    levels: dict[int, list[int]] = {}
    raw_edges: dict[int, list[tuple[int, int, int, float]]] = {}
    n_graphlets = n_edges = 0
    for lineno, line in enumerate(lines[1:-1], 2):
        parts = line.split()
        try:
            if parts[0] == "E":
                k, ph = parts[1].split(":")
                k = int(k)
                raw_edges.setdefault(k, []).append(
                    (int(ph, 16), int(parts[2], 16), int(parts[3]), float(parts[4])))
                n_edges += 1
            else:
                k, h = parts[0].split(":")
                k, ordinal = int(k), int(parts[1])
                lst = levels.setdefault(k, [])
                if ordinal != len(lst):
                    raise ValueError("ordinal out of sequence")
                lst.append(int(h, 16))
                n_graphlets += 1
        except (ValueError, IndexError) as exc:
            raise GraphFormatError(f"{path}:{lineno}: malformed line ({exc})") from None
    try:
        want_g, want_e = (int(x) for x in lines[-1].split()[1:3])
    except ValueError:
        raise GraphFormatError(f"{path}: malformed END record") from None
    if (want_g, want_e) != (n_graphlets, n_edges):
        raise GraphFormatError(f"{path}: record count mismatch, file is truncated or corrupt")
    if max(levels) != kmax:
        raise GraphFormatError(f"{path}: header kmax={kmax} but levels go to {max(levels)}")

    try:
        catalog = GraphletCatalog({k: np.array(v, dtype=np.int64) for k, v in levels.items()},
                                  universe)
        edges = {}
        for k, rows in raw_edges.items():
            p = catalog.ordinals(k, [r[0] for r in rows])
            c = catalog.ordinals(k + 1, [r[1] for r in rows])
            le = LevelEdges(k, p, c, [r[2] for r in rows])
            stored = np.array([r[3] for r in rows])[np.lexsort((c, p))]
            if not np.allclose(le.w, stored, rtol=0, atol=1e-15):
                raise ValueError(f"stored weights at level {k} disagree with multiplicities")
            le.w = stored
            edges[k] = le
    except ValueError as exc:
        raise GraphFormatError(f"{path}: inconsistent catalog ({exc})") from None
    return catalog, GraphletDag(catalog, edges)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "ssgk"


def cache_file_name(kmax: int, universe: str = "connected") -> str:
    return f"catalog-k{kmax}.txt" if universe == "connected" else f"catalog-{universe}-k{kmax}.txt"


@functools.lru_cache(maxsize=None)
def _get_catalog(kmax, cache_dir, universe):
    if cache_dir is not None:
        path = Path(cache_dir) / cache_file_name(kmax, universe)
        if path.is_file():
            try:
                catalog, dag = load_catalog(path)
                if catalog.universe == universe:
                    return catalog, dag
                log.warning("rebuilding catalog: %s holds the %r universe", path, catalog.universe)
            except GraphFormatError as exc:
                log.warning("rebuilding catalog: %s", exc)
    catalog = build_catalog(kmax, universe)
    dag = build_dag(catalog)
    if cache_dir is not None:
        try:
            Path(cache_dir).mkdir(parents=True, exist_ok=True)
            save_catalog(catalog, dag, Path(cache_dir) / cache_file_name(kmax, universe))
        except OSError as exc:
            log.warning("could not write catalog cache: %s", exc)
    return catalog, dag


def get_catalog(kmax: int, cache_dir=None, use_cache=True,
                universe: str = "connected") -> tuple[GraphletCatalog, GraphletDag]:
    """Catalog and DAG up to ``kmax``, memoised in-process and on disk."""
    _check_kmax(kmax)
    _check_universe(universe)
    if use_cache and cache_dir is None:
        cache_dir = default_cache_dir()
    return _get_catalog(int(kmax), str(cache_dir) if use_cache else None, universe)
