import itertools
import math

import networkx as nx
import numpy as np
import pytest

from ssgk import (EstimationError, Graph, GraphCollection, SamplingError, count_collection,
                  enumerate_all_subgraphs, enumerate_connected_subgraphs, powerlaw_table,
                  sample_connected_subgraphs)
from ssgk.canonical import canonical_form
from ssgk.graph import complete_graph, induced_subgraph, path_graph
from ssgk.sampling import enumerate_subgraphs, loglog_slope

from conftest import random_graph, to_nx


def brute_force(g, k, catalog, connected_only):
    counts = np.zeros(catalog.size(k), dtype=np.int64)
    for sub in itertools.combinations(range(g.num_vertices), k):
        h = induced_subgraph(g, sub)
        if connected_only and not nx.is_connected(to_nx(h)):
            continue
        counts[catalog.ordinal(k, canonical_form(h).bits)] += 1
    return counts


@pytest.mark.parametrize("seed", range(6))
def test_esu_matches_brute_force(cat6, cat_all6, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, int(rng.integers(6, 11)), float(rng.uniform(0.15, 0.5)))
    for k in (3, 4, 5):
        got = enumerate_connected_subgraphs(g, k, cat6[0])
        assert got.counts.tolist() == brute_force(g, k, cat6[0], True).tolist()
        every = enumerate_all_subgraphs(g, k, cat_all6[0])
        assert every.counts.tolist() == brute_force(g, k, cat_all6[0], False).tolist()
        assert every.total == math.comb(g.num_vertices, k)


def test_known_counts(cat6):
    catalog = cat6[0]
    k4 = enumerate_connected_subgraphs(complete_graph(4), 3, catalog)
    assert k4.counts.tolist() == [0, 4]
    p5 = enumerate_connected_subgraphs(path_graph(5), 3, catalog)
    assert p5.counts.tolist() == [3, 0]
    assert enumerate_connected_subgraphs(path_graph(3), 5, catalog).total == 0


def test_enumerate_dispatches_on_universe(cat6, cat_all6):
    g = Graph(4, [(0, 1), (2, 3)])
    assert enumerate_subgraphs(g, 3, cat6[0]).total == 0
    assert enumerate_subgraphs(g, 3, cat_all6[0]).total == 4
    with pytest.raises(ValueError):
        enumerate_all_subgraphs(g, 3, cat6[0])


@pytest.mark.parametrize("method", ["expand", "reject"])
def test_sampling_is_seeded(cat6, method):
    g = random_graph(np.random.default_rng(5), 12, 0.3)
    a = sample_connected_subgraphs(g, 4, 500, seed=1, method=method, catalog=cat6[0])
    b = sample_connected_subgraphs(g, 4, 500, seed=1, method=method, catalog=cat6[0])
    c = sample_connected_subgraphs(g, 4, 500, seed=2, method=method, catalog=cat6[0])
    assert a.total == 500
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_reject_sampling_is_unbiased(cat6):
    # uniform over connected k-subsets, so the mean of many runs tends to the exhaustive histogram
    g = random_graph(np.random.default_rng(11), 12, 0.35)
    exact = enumerate_connected_subgraphs(g, 4, cat6[0]).counts
    exact = exact / exact.sum()
    runs = [sample_connected_subgraphs(g, 4, 2000, seed=s, method="reject", catalog=cat6[0]).counts
            for s in range(20)]
    est = np.sum(runs, axis=0) / (20 * 2000)
    assert np.abs(est - exact).sum() < 0.05


def test_uniform_sampling_matches_all_subsets(cat_all6):
    g = random_graph(np.random.default_rng(12), 14, 0.2)
    exact = enumerate_all_subgraphs(g, 5, cat_all6[0]).counts
    est = sample_connected_subgraphs(g, 5, 40_000, seed=0, method="uniform", catalog=cat_all6[0])
    assert np.abs(est.counts / est.total - exact / exact.sum()).sum() < 0.05


def test_sampling_failures(cat6):
    matching = Graph(6, [(0, 1), (2, 3), (4, 5)])
    for method in ("expand", "reject"):
        with pytest.raises(SamplingError) as exc:
            sample_connected_subgraphs(matching, 3, 10, 0, method=method, catalog=cat6[0])
        assert exc.value.accepted == 0
    with pytest.raises(SamplingError):
        sample_connected_subgraphs(path_graph(3), 5, 10, 0, catalog=cat6[0])
    with pytest.raises(ValueError):
        sample_connected_subgraphs(path_graph(5), 3, 10, 0, method="uniform", catalog=cat6[0])
    with pytest.raises(ValueError):
        sample_connected_subgraphs(path_graph(5), 3, 10, 0, method="walk", catalog=cat6[0])
    with pytest.raises(ValueError):
        sample_connected_subgraphs(path_graph(5), 7, 10, 0, catalog=cat6[0])


def test_collection_counts_ignore_worker_count(cat6):
    rng = np.random.default_rng(2)
    coll = GraphCollection([random_graph(rng, 10, 0.35) for _ in range(6)], [0, 1] * 3)
    one = count_collection(coll, 4, cat6[0], samples=300, seed=9, workers=1)
    many = count_collection(coll, 4, cat6[0], samples=300, seed=9, workers=3)
    assert all(np.array_equal(a.counts, b.counts) for a, b in zip(one, many))
    # graphs draw independent streams
    assert not np.array_equal(one[0].counts, count_collection(
        GraphCollection([coll[1]], [0]), 4, cat6[0], samples=300, seed=9)[0].counts)


def test_powerlaw_table(cat6, mutag):
    counts = enumerate_connected_subgraphs(mutag[0], 5, cat6[0])
    table = powerlaw_table(counts)
    freqs = [f for _, f in table]
    assert [r for r, _ in table] == list(range(1, len(table) + 1))
    assert freqs == sorted(freqs, reverse=True)
    assert sum(freqs) == counts.total
    with pytest.raises(EstimationError):
        powerlaw_table(enumerate_connected_subgraphs(path_graph(3), 5, cat6[0]))


def test_loglog_slope():
    table = [(r, 1000 * r ** -2.0) for r in range(1, 20)]
    assert loglog_slope(table) == pytest.approx(-2.0)
