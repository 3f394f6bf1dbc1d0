import itertools
from pathlib import Path

import networkx as nx
import pytest

from ssgk import Graph, get_catalog, parse_tu_dataset

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session", autouse=True)
def _private_cache(tmp_path_factory):
    # keep catalog files out of the user's cache directory
    mp = pytest.MonkeyPatch()
    mp.setenv("SSGK_CACHE_DIR", str(tmp_path_factory.mktemp("catalog-cache")))
    yield
    mp.undo()


@pytest.fixture(scope="session")
def mutag():
    return parse_tu_dataset(DATA / "MUTAG", "MUTAG")


@pytest.fixture(scope="session")
def cat6():
    return get_catalog(6, use_cache=False)


@pytest.fixture(scope="session")
def cat_all6():
    return get_catalog(6, use_cache=False, universe="all")


def random_graph(rng, n, p):
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.num_vertices))
    h.add_edges_from(g.edges.tolist())
    return h


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title, ok, detail)`` then assert ``ok``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(n, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}" + (f" -- {detail}" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
