"""Counting induced k-subgraphs by graphlet type: exhaustive enumeration and sampling.

Exhaustive counting uses the ESU scheme: every connected k-vertex set is
grown from its smallest vertex ``v`` by only ever adding vertices ``> v``
from the exclusive neighbourhood, so each set is produced exactly once.

Sampling has three modes. ``expand`` picks a uniform start vertex and
grows the set by a uniformly chosen vertex of the current set's
neighbourhood; it is fast but over-represents dense regions. ``reject``
draws uniform k-subsets and keeps the connected ones, which is unbiased
given connectivity but slow on sparse graphs. ``uniform`` keeps every
uniform k-subset, disconnected ones included, and needs a catalog of the
``"all"`` universe. All of them read their randomness from pre-drawn
uniforms so the compiled and interpreted kernels agree bit for bit.

With an ``"all"`` catalog, exhaustive counting visits all ``C(n, k)``
vertex subsets instead of only the connected ones.
"""

from __future__ import annotations

import concurrent.futures as cf
import os

import numpy as np

from ._jit import njit
from .canonical import BITPOS, canonicalize_many, num_pairs
from .catalog import GraphletCatalog
from .errors import EstimationError, SamplingError
from .graph import Graph, GraphCollection
from .vectors import CountVector

SAMPLING_METHODS = ("expand", "reject", "uniform")
ATTEMPT_FACTOR = 100
# exhaustive counts are histogrammed over raw codes up to this size
_HIST_MAX_K = 7


@njit
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        x = indices[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit
def _block(indptr, indices, blocked, x, delta):
    blocked[x] += delta
    for p in range(indptr[x], indptr[x + 1]):
        blocked[indices[p]] += delta


@njit
def _emit(c, hist, buf, nbuf):
    if hist.shape[0] > 0:
        hist[c] += 1
        return buf, nbuf
    if nbuf == buf.shape[0]:
        grown = np.empty(max(16, 2 * buf.shape[0]), dtype=np.int64)
        grown[:nbuf] = buf[:nbuf]
        buf = grown
    buf[nbuf] = c
    return buf, nbuf + 1


@njit
def _all_subsets(indptr, indices, n, k, pos, hist, buf):
    """Every k-subset in lexicographic order; same output contract as ``_esu``."""
    sub = np.empty(k, dtype=np.int64)
    partial = np.zeros(k, dtype=np.int64)
    nbuf = 0
    found = 0
    d = 0
    sub[0] = 0
    while d >= 0:
        if sub[d] > n - (k - d):
            d -= 1
            if d >= 0:
                sub[d] += 1
            continue
        c = partial[d]
        for i in range(d):
            if _has_edge(indptr, indices, sub[i], sub[d]):
                c |= 1 << pos[i, d]
        if d == k - 1:
            buf, nbuf = _emit(c, hist, buf, nbuf)
            found += 1
            sub[d] += 1
        else:
            partial[d + 1] = c
            d += 1
            sub[d] = sub[d - 1] + 1
    return buf, nbuf, found


@njit
def _esu(indptr, indices, n, k, pos, hist, buf):
    """Enumerate connected induced k-subgraphs.

    Each subgraph's raw code (vertex order = discovery order) is added to
    ``hist`` when it is non-empty, otherwise appended to ``buf`` (grown on
    demand). Returns ``(buf, n_written, n_found)``.
    """
    sub = np.empty(k, dtype=np.int64)
    partial = np.zeros(k, dtype=np.int64)
    blocked = np.zeros(n, dtype=np.int64)
    ext = np.empty((k, n), dtype=np.int64)
    ext_len = np.zeros(k, dtype=np.int64)
    nbuf = 0
    found = 0
    for v in range(n):
        sub[0] = v
        partial[0] = 0
        _block(indptr, indices, blocked, v, 1)
        m = 0
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if u > v:
                ext[0, m] = u
                m += 1
        ext_len[0] = m
        d = 0
        while d >= 0:
            if ext_len[d] == 0:
                _block(indptr, indices, blocked, sub[d], -1)
                d -= 1
                continue
            ext_len[d] -= 1
            w = ext[d, ext_len[d]]
            c = partial[d]
            for i in range(d + 1):
                if _has_edge(indptr, indices, sub[i], w):
                    c |= 1 << pos[i, d + 1]
            if d + 1 == k - 1:
                found += 1
                buf, nbuf = _emit(c, hist, buf, nbuf)
                continue
            m = ext_len[d]
            for i in range(m):
                ext[d + 1, i] = ext[d, i]
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                if u > v and blocked[u] == 0:
                    ext[d + 1, m] = u
                    m += 1
            ext_len[d + 1] = m
            _block(indptr, indices, blocked, w, 1)
            d += 1
            sub[d] = w
            partial[d] = c
    return buf, nbuf, found


@njit
def _sample_expand(indptr, indices, n, k, pos, uniforms, out, start, target):
    """Run attempts row by row over ``uniforms`` (shape ``(rows, k)``).

    Accepted raw codes are written to ``out[start:]``. Stops after
    ``target`` acceptances or when the rows run out. Returns
    ``(accepted, rows_used)``.
    """
    in_set = np.zeros(n, dtype=np.bool_)
    in_front = np.zeros(n, dtype=np.bool_)
    members = np.empty(k, dtype=np.int64)
    front = np.empty(n, dtype=np.int64)
    accepted = 0
    row = 0
    while row < uniforms.shape[0] and accepted < target:
        s = min(int(uniforms[row, 0] * n), n - 1)
        members[0] = s
        in_set[s] = True
        nf = 0
        for p in range(indptr[s], indptr[s + 1]):
            u = indices[p]
            if not in_front[u]:
                in_front[u] = True
                front[nf] = u
                nf += 1
        code = 0
        size = 1
        while size < k and nf > 0:
            j = min(int(uniforms[row, size] * nf), nf - 1)
            w = front[j]
            nf -= 1
            front[j] = front[nf]
            in_front[w] = False
            for i in range(size):
                if _has_edge(indptr, indices, members[i], w):
                    code |= 1 << pos[i, size]
            members[size] = w
            in_set[w] = True
            size += 1
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                if not in_set[u] and not in_front[u]:
                    in_front[u] = True
                    front[nf] = u
                    nf += 1
        if size == k:
            out[start + accepted] = code
            accepted += 1
        for i in range(size):
            in_set[members[i]] = False
        for i in range(nf):
            in_front[front[i]] = False
        row += 1
    return accepted, row


@njit
def _sample_reject(indptr, indices, n, k, pos, uniforms, out, start, target, perm, keep_all):
    """Uniform k-subsets by partial Fisher-Yates over ``perm``; keep connected
    ones (or all of them with ``keep_all``)."""
    accepted = 0
    row = 0
    members = np.empty(k, dtype=np.int64)
    while row < uniforms.shape[0] and accepted < target:
        for i in range(k):
            j = i + min(int(uniforms[row, i] * (n - i)), n - i - 1)
            t = perm[i]
            perm[i] = perm[j]
            perm[j] = t
            members[i] = perm[i]
        code = 0
        for i in range(k):
            for j in range(i + 1, k):
                if _has_edge(indptr, indices, members[i], members[j]):
                    code |= 1 << pos[i, j]
        if keep_all:
            out[start + accepted] = code
            accepted += 1
            row += 1
            continue
        # connectivity by bitset BFS over the k members
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for a in range(k):
                if (frontier >> a) & 1:
                    for b in range(k):
                        if a != b and not (seen >> b) & 1 and (code >> pos[a, b]) & 1:
                            nxt |= 1 << b
            seen |= nxt
            frontier = nxt
        if seen == (1 << k) - 1:
            out[start + accepted] = code
            accepted += 1
        row += 1
    return accepted, row


def _check_level(k, catalog):
    if not isinstance(k, (int, np.integer)) or not 2 <= k <= catalog.kmax:
        raise ValueError(f"k must be in 2..{catalog.kmax}, got {k!r}")


def _check_method(method, catalog):
    if method not in SAMPLING_METHODS:
        raise ValueError(f"method must be one of {SAMPLING_METHODS}, got {method!r}")
    if method == "uniform" and catalog is not None and catalog.universe != "all":
        raise ValueError("uniform sampling keeps disconnected subsets and needs an 'all' catalog")


def codes_to_counts(raw_codes, k: int, catalog: GraphletCatalog, weights=None) -> CountVector:
    """Histogram raw (non-canonical) k-vertex codes into catalog ordinals."""
    counts = np.zeros(catalog.size(k), dtype=np.int64)
    raw_codes = np.asarray(raw_codes, dtype=np.int64)
    if raw_codes.size:
        ords = catalog.ordinals(k, canonicalize_many(raw_codes, k))
        w = np.ones(raw_codes.size, dtype=np.int64) if weights is None else np.asarray(weights, np.int64)
        np.add.at(counts, ords, w)
    return CountVector(k, counts)


def _run_enumeration(kernel, g, k, catalog):
    n = g.num_vertices
    if n < k:
        return CountVector(k, np.zeros(catalog.size(k), dtype=np.int64))
    if k <= _HIST_MAX_K:
        hist = np.zeros(1 << num_pairs(k), dtype=np.int64)
        kernel(g.indptr, g.indices, n, k, BITPOS[k], hist, np.empty(0, dtype=np.int64))
        nz = np.flatnonzero(hist)
        return codes_to_counts(nz, k, catalog, weights=hist[nz])
    buf, nbuf, _ = kernel(g.indptr, g.indices, n, k, BITPOS[k],
                          np.empty(0, dtype=np.int64), np.empty(1024, dtype=np.int64))
    uniq, cnt = np.unique(buf[:nbuf], return_counts=True)
    return codes_to_counts(uniq, k, catalog, weights=cnt)


def enumerate_connected_subgraphs(g: Graph, k: int, catalog: GraphletCatalog) -> CountVector:
    """Exact count of every connected level-k graphlet as an induced subgraph of ``g``."""
    _check_level(k, catalog)
    return _run_enumeration(_esu, g, k, catalog)


def enumerate_all_subgraphs(g: Graph, k: int, catalog: GraphletCatalog) -> CountVector:
    """Induced graph of every k-vertex subset; the total is ``C(n, k)``."""
    _check_level(k, catalog)
    if catalog.universe != "all":
        raise ValueError("counting disconnected subsets needs an 'all' catalog")
    return _run_enumeration(_all_subsets, g, k, catalog)


def enumerate_subgraphs(g: Graph, k: int, catalog: GraphletCatalog) -> CountVector:
    """Exhaustive counts over the catalog's universe."""
    if catalog.universe == "all":
        return enumerate_all_subgraphs(g, k, catalog)
    return enumerate_connected_subgraphs(g, k, catalog)


def graph_rng(seed: int, index: int = 0, *extra: int) -> np.random.Generator:
    """Independent stream per (base seed, graph index, ...)."""
    key = [int(seed) & (2**64 - 1), int(index), *(int(x) for x in extra)]
    return np.random.default_rng(np.random.SeedSequence(key))


def sample_raw_codes(g: Graph, k: int, n_samples: int, rng: np.random.Generator,
                     method: str = "expand") -> np.ndarray:
    """Raw codes of ``n_samples`` accepted k-subsets, in the order drawn."""
    _check_method(method, None)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = g.num_vertices
    budget = ATTEMPT_FACTOR * n_samples
    out = np.empty(n_samples, dtype=np.int64)
    if n < k:
        raise SamplingError(f"graph has {n} < {k} vertices", accepted=0)
    pos = BITPOS[k]
    perm = np.arange(n, dtype=np.int64)
    accepted = attempts = 0
    while accepted < n_samples and attempts < budget:
        rows = min(budget - attempts, max(2 * (n_samples - accepted), 256))
        u = rng.random((rows, k))
        if method == "expand":
            acc, used = _sample_expand(g.indptr, g.indices, n, k, pos, u, out,
                                       accepted, n_samples - accepted)
        else:
            acc, used = _sample_reject(g.indptr, g.indices, n, k, pos, u, out,
                                       accepted, n_samples - accepted, perm,
                                       method == "uniform")
        accepted += int(acc)
        attempts += int(used)
    if accepted < n_samples:
        raise SamplingError(
            f"attempt budget of {budget} exhausted with {accepted}/{n_samples} "
            f"connected {k}-subgraphs accepted", accepted=accepted)
    return out


def _sampled_counts(g, k, n_samples, rng, method, catalog):
    raw = sample_raw_codes(g, k, n_samples, rng, method)
    uniq, cnt = np.unique(raw, return_counts=True)
    return codes_to_counts(uniq, k, catalog, weights=cnt)


def sample_connected_subgraphs(g: Graph, k: int, n_samples: int, seed: int,
                               method: str = "expand", catalog: GraphletCatalog = None) -> CountVector:
    """Graphlet histogram of ``n_samples`` sampled k-subsets (with replacement)."""
    if catalog is None:
        raise ValueError("a catalog is required")
    _check_level(k, catalog)
    _check_method(method, catalog)
    return _sampled_counts(g, k, n_samples, graph_rng(seed), method, catalog)


def count_collection(collection: GraphCollection, k: int, catalog: GraphletCatalog, *,
                     samples: int | None = 10_000, seed: int = 0, method: str = "expand",
                     workers: int | None = None) -> list[CountVector]:
    """Per-graph count vectors; ``samples=None`` means exhaustive enumeration.

    Graph ``i`` draws from its own stream seeded by ``(seed, i, k)``, so the
    result does not depend on ``workers``.
    """
    _check_level(k, catalog)
    if samples is not None:
        _check_method(method, catalog)

    def one(i):
        g = collection.graphs[i]
        if samples is None:
            return enumerate_subgraphs(g, k, catalog)
        return _sampled_counts(g, k, samples, graph_rng(seed, i, k), method, catalog)

    idx = range(len(collection))
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        return [one(i) for i in idx]
    with cf.ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, idx))


def powerlaw_table(counts: CountVector) -> list[tuple[int, int]]:
    """(rank, frequency) of the non-zero graphlets, most frequent first.

    Ties keep ascending ordinal order.
    """
    if counts.total <= 0:
        raise EstimationError("cannot rank an all-zero count vector")
    c = counts.counts
    nz = np.flatnonzero(c)
    order = nz[np.lexsort((nz, -c[nz]))]
    return [(r, int(c[i])) for r, i in enumerate(order.tolist(), 1)]


def loglog_slope(table) -> float:
    """Least-squares slope of log(frequency) against log(rank)."""
    if len(table) < 2:
        raise EstimationError("need at least two ranks for a slope")
    r = np.log([t[0] for t in table])
    f = np.log([t[1] for t in table])
    return float(np.polyfit(r, f, 1)[0])
