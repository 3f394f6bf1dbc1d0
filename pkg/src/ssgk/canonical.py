"""Canonical isomorphism codes for graphs on 2..8 vertices.

A graph on ``k`` vertices is packed into an upper-triangular bit code: the
pairs ``(i, j)``, ``i < j``, are taken in row-major order and pair ``(0, 1)``
is the most significant bit. The canonical code is the minimum of that
integer over all ``k!`` relabelings. It is found by a depth-first search
that fixes one label position at a time and prunes with a lower bound: for
every fixed row the number of its remaining 1-bits is known (degree minus
already-placed neighbours), and the smallest value those bits can take is
with all of them packed into the row's least significant slots.
"""

from __future__ import annotations

import threading
from typing import NamedTuple

import numpy as np

from ._jit import njit
from .graph import Graph

MIN_K = 2
MAX_K = 8

_INF = np.iinfo(np.int64).max


def num_pairs(k: int) -> int:
    return k * (k - 1) // 2


def _make_bitpos(k):
    """``bitpos[i, j]`` = exponent of the bit for pair (i, j); symmetric."""
    b = num_pairs(k)
    pos = np.full((MAX_K, MAX_K), -1, dtype=np.int64)
    idx = 0
    for i in range(k):
        for j in range(i + 1, k):
            pos[i, j] = pos[j, i] = b - 1 - idx
            idx += 1
    return pos


BITPOS = tuple(_make_bitpos(k) for k in range(MAX_K + 1))


class CanonicalCode(NamedTuple):
    num_vertices: int
    bits: int

    @property
    def token(self) -> str:
        return f"{self.num_vertices}:{self.bits:x}"

    @classmethod
    def from_token(cls, token: str) -> "CanonicalCode":
        k, _, h = token.partition(":")
        if not h:
            raise ValueError(f"bad graphlet token {token!r}")
        return cls(int(k), int(h, 16))

    def __str__(self):
        return self.token


@njit
def _code_to_adj(code, k, bitpos):
    adj = np.zeros((k, k), dtype=np.uint8)
    for i in range(k):
        for j in range(i + 1, k):
            if (code >> bitpos[i, j]) & 1:
                adj[i, j] = 1
                adj[j, i] = 1
    return adj


@njit
def _canon_min(code, k, bitpos):
    adj = _code_to_adj(code, k, bitpos)
    deg = np.zeros(k, dtype=np.int64)
    for i in range(k):
        for j in range(k):
            deg[i] += adj[i, j]

    best = _INF
    perm = np.zeros(k, dtype=np.int64)
    used = np.zeros(k, dtype=np.bool_)
    cand = np.zeros(k + 1, dtype=np.int64)
    depth = 0
    while depth >= 0:
        c = cand[depth]
        if c >= k:
            depth -= 1
            if depth >= 0:
                used[perm[depth]] = False
                cand[depth] += 1
            continue
        if used[c]:
            cand[depth] += 1
            continue
        perm[depth] = c

        # lower bound over rows 0..depth; rows below contribute >= 0
        lb = 0
        for i in range(depth + 1):
            vi = perm[i]
            placed = 0
            for j in range(depth + 1):
                if j != i and adj[vi, perm[j]]:
                    placed += 1
                    if j > i:
                        lb |= 1 << bitpos[i, j]
            rest = deg[vi] - placed
            for t in range(rest):
                lb |= 1 << bitpos[i, k - 1 - t]

        if depth == k - 1:
            if lb < best:
                best = lb
            cand[depth] += 1
        elif lb >= best:
            cand[depth] += 1
        else:
            used[c] = True
            depth += 1
            cand[depth] = 0
    return best


@njit
def _canon_batch(codes, k, bitpos):
    out = np.empty(codes.shape[0], dtype=np.int64)
    for i in range(codes.shape[0]):
        out[i] = _canon_min(codes[i], k, bitpos)
    return out


@njit
def _permute_code(code, k, perm, bitpos):
    out = 0
    for i in range(k):
        for j in range(i + 1, k):
            if (code >> bitpos[i, j]) & 1:
                out |= 1 << bitpos[perm[i], perm[j]]
    return out


_cache: list[dict[int, int]] = [dict() for _ in range(MAX_K + 1)]
_cache_lock = threading.Lock()


def _check_k(k):
    if not MIN_K <= k <= MAX_K:
        raise ValueError(f"graph size must be in {MIN_K}..{MAX_K}, got {k}")


def canonical_bits(raw: int, k: int) -> int:
    """Canonical code of the graph whose identity-labeled code is ``raw``."""
    _check_k(k)
    raw = int(raw)
    cache = _cache[k]
    hit = cache.get(raw)
    if hit is None:
        hit = int(_canon_min(np.int64(raw), k, BITPOS[k]))
        with _cache_lock:
            cache[raw] = hit
    return hit


def canonicalize_many(raw_codes, k: int) -> np.ndarray:
    """Vectorised :func:`canonical_bits` over an integer array."""
    _check_k(k)
    raw_codes = np.asarray(raw_codes, dtype=np.int64)
    uniq, inverse = np.unique(raw_codes, return_inverse=True)
    cache = _cache[k]
    missing = np.array([u for u in uniq.tolist() if u not in cache], dtype=np.int64)
    if missing.size:
        canon = _canon_batch(missing, k, BITPOS[k])
        with _cache_lock:
            cache.update(zip(missing.tolist(), canon.tolist()))
    mapped = np.array([cache[u] for u in uniq.tolist()], dtype=np.int64)
    return mapped[inverse].reshape(raw_codes.shape)


def clear_cache():
    with _cache_lock:
        for c in _cache:
            c.clear()


def graph_code(g: Graph) -> int:
    """Bit code of ``g`` under its own labeling (not canonical)."""
    k = g.num_vertices
    _check_k(k)
    pos = BITPOS[k]
    code = 0
    for u, v in g.edges.tolist():
        code |= 1 << int(pos[u, v])
    return code


def graph_from_code(bits: int, k: int) -> Graph:
    _check_k(k)
    if not 0 <= bits < (1 << num_pairs(k)):
        raise ValueError(f"code {bits} out of range for k={k}")
    pos = BITPOS[k]
    edges = [(i, j) for i in range(k) for j in range(i + 1, k) if (bits >> int(pos[i, j])) & 1]
    return Graph(k, edges)


def permute_code(bits: int, k: int, perm) -> int:
    """Code of the relabeled graph in which vertex ``i`` becomes ``perm[i]``."""
    return int(_permute_code(np.int64(bits), k, np.asarray(perm, dtype=np.int64), BITPOS[k]))


def canonical_form(g: Graph) -> CanonicalCode:
    k = g.num_vertices
    _check_k(k)
    return CanonicalCode(k, canonical_bits(graph_code(g), k))


def are_isomorphic(a: Graph, b: Graph) -> bool:
    _check_k(a.num_vertices)
    _check_k(b.num_vertices)
    if a.num_vertices != b.num_vertices or a.num_edges != b.num_edges:
        return False
    return canonical_form(a) == canonical_form(b)
