"""Undirected simple graphs, dataset ingestion and elementary operations."""

from __future__ import annotations

import logging
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, IngestionError

log = logging.getLogger(__name__)


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v`` in lexicographic
    order. A CSR view (``indptr``, ``indices``, neighbours sorted) is built
    eagerly because every kernel in the package consumes it.
    """

    __slots__ = ("num_vertices", "edges", "indptr", "indices")

    def __init__(self, num_vertices: int, edges: Iterable[Sequence[int]] = ()):
        n = int(num_vertices)
        if n < 0:
            raise ValueError(f"num_vertices must be non-negative, got {n}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        e.setflags(write=False)

        deg = np.bincount(e.ravel(), minlength=n) if e.size else np.zeros(n, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        indices = dst[order].astype(np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)

        object.__setattr__(self, "num_vertices", n)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=bool)
        if self.num_edges:
            a[self.edges[:, 0], self.edges[:, 1]] = True
            a[self.edges[:, 1], self.edges[:, 0]] = True
        return a

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        p = np.asarray(perm, dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.num_vertices)):
            raise ValueError("perm must be a permutation of the vertex set")
        return Graph(self.num_vertices, p[self.edges] if self.num_edges else ())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.num_vertices == other.num_vertices
                and np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.num_vertices, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.num_vertices}, m={self.num_edges})"


@dataclass
class GraphCollection:
    graphs: list[Graph]
    labels: np.ndarray
    name: str = ""
    classes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape[0] != len(self.graphs):
            raise ValueError(
                f"{len(self.graphs)} graphs but {self.labels.shape[0]} labels")
        self.classes = np.unique(self.labels)

    def __len__(self):
        return len(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]

    def __iter__(self):
        return iter(self.graphs)

    def stats(self) -> dict:
        nodes = np.array([g.num_vertices for g in self.graphs], dtype=float)
        edges = np.array([g.num_edges for g in self.graphs], dtype=float)
        return {
            "size": len(self.graphs),
            "classes": {int(c): int((self.labels == c).sum()) for c in self.classes},
            "avg_nodes": float(nodes.mean()) if nodes.size else 0.0,
            "avg_edges": float(edges.mean()) if edges.size else 0.0,
        }


def _read_lines(path):
    if not os.path.isfile(path):
        raise IngestionError(f"missing dataset file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _ints(line, path, lineno, width=None):
    parts = [p for p in line.replace(",", " ").split()]
    if width is not None and len(parts) != width:
        raise GraphFormatError(
            f"{os.path.basename(path)}:{lineno}: expected {width} fields, got {len(parts)}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphFormatError(
            f"{os.path.basename(path)}:{lineno}: non-integer value in {line!r}") from None


def parse_tu_dataset(directory_path, dataset_name: str) -> GraphCollection:
    """Load a benchmark dataset in the TU Dortmund text format.

    Reads ``<DS>_A.txt``, ``<DS>_graph_indicator.txt`` and
    ``<DS>_graph_labels.txt``. Node and edge label files are ignored.
    """
    base = os.path.join(os.fspath(directory_path), dataset_name)
    a_path = base + "_A.txt"
    ind_path = base + "_graph_indicator.txt"
    lab_path = base + "_graph_labels.txt"
    a_lines = _read_lines(a_path)
    ind_lines = _read_lines(ind_path)
    lab_lines = _read_lines(lab_path)

    for extra in ("_node_labels.txt", "_edge_labels.txt",
                  "_node_attributes.txt", "_edge_attributes.txt"):
        if os.path.isfile(base + extra):
            log.info("ignoring %s%s (labels/attributes are not used)", dataset_name, extra)

    indicator = []
    for i, line in enumerate(ind_lines, 1):
        if line.strip():
            indicator.append(_ints(line, ind_path, i, 1)[0])
    indicator = np.asarray(indicator, dtype=np.int64)
    labels = []
    for i, line in enumerate(lab_lines, 1):
        if line.strip():
            labels.append(_ints(line, lab_path, i, 1)[0])
    labels = np.asarray(labels, dtype=np.int64)

    n_nodes = indicator.shape[0]
    n_graphs = labels.shape[0]
    if n_nodes == 0:
        raise GraphFormatError(f"{ind_path}: no nodes")
    if indicator.min() < 1 or indicator.max() > n_graphs:
        raise GraphFormatError(
            f"{ind_path}: graph ids must lie in 1..{n_graphs} (one label per graph)")

    # dense 0-based index of every node inside its own graph
    local = np.empty(n_nodes, dtype=np.int64)
    sizes = np.zeros(n_graphs, dtype=np.int64)
    for node, gid in enumerate(indicator):
        local[node] = sizes[gid - 1]
        sizes[gid - 1] += 1

    per_graph: list[list[tuple[int, int]]] = [[] for _ in range(n_graphs)]
    for i, line in enumerate(a_lines, 1):
        if not line.strip():
            continue
        u, v = _ints(line, a_path, i, 2)
        if not (1 <= u <= n_nodes and 1 <= v <= n_nodes):
            raise GraphFormatError(f"{os.path.basename(a_path)}:{i}: node id out of range")
        gu, gv = indicator[u - 1], indicator[v - 1]
        if gu != gv:
            raise GraphFormatError(
                f"{os.path.basename(a_path)}:{i}: edge ({u}, {v}) joins graph {gu} and graph {gv}")
        if u == v:
            log.warning("%s:%d: dropping self-loop on node %d", os.path.basename(a_path), i, u)
            continue
        per_graph[gu - 1].append((local[u - 1], local[v - 1]))

    graphs = [Graph(int(sizes[g]), per_graph[g]) for g in range(n_graphs)]
    return GraphCollection(graphs, labels, dataset_name)


def parse_edge_list(text: str) -> Graph:
    """Parse the minimal ``"n m"`` header + ``"u v"`` lines format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty edge list")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphFormatError("line 1: expected header 'n m'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphFormatError("line 1: non-integer header") from None
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = []
    for i, line in enumerate(lines[1:], 2):
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {i}: expected 'u v' (weighted or extra columns rejected)")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {i}: non-integer vertex") from None
        if u == v:
            raise GraphFormatError(f"line {i}: self-loop on vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {i}: vertex out of range 0..{n - 1}")
        edges.append((u, v))
    return Graph(n, edges)


def format_edge_list(g: Graph) -> str:
    out = [f"{g.num_vertices} {g.num_edges}"]
    out += [f"{u} {v}" for u, v in g.edges.tolist()]
    return "\n".join(out) + "\n"


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    """Subgraph on ``vertices``; vertex ``vertices[i]`` becomes ``i``."""
    vs = [int(v) for v in vertices]
    if len(set(vs)) != len(vs):
        raise ValueError("duplicate vertex in induced_subgraph")
    for v in vs:
        if not 0 <= v < g.num_vertices:
            raise ValueError(f"vertex {v} out of range")
    pos = {v: i for i, v in enumerate(vs)}
    edges = []
    for v in vs:
        for u in g.neighbors(v).tolist():
            j = pos.get(u)
            if j is not None and pos[v] < j:
                edges.append((pos[v], j))
    return Graph(len(vs), edges)


def is_connected(g: Graph) -> bool:
    n = g.num_vertices
    if n == 0:
        raise ValueError("is_connected requires at least one vertex")
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v).tolist():
            if not seen[u]:
                seen[u] = True
                count += 1
                queue.append(u)
    return count == n


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])
