import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssgk import (CountVector, Distribution, EstimationError, GraphFormatError, base_distribution,
                  build_catalog, build_dag, get_catalog, load_catalog, push_forward, save_catalog)
from ssgk.catalog import cache_file_name, structural_prior
from ssgk.canonical import canonical_form, graph_from_code, num_pairs
from ssgk.graph import induced_subgraph

from conftest import to_nx

CONNECTED = {2: 1, 3: 2, 4: 6, 5: 21, 6: 112}
ALL = {2: 2, 3: 4, 4: 11, 5: 34, 6: 156}


def test_level_sizes(cat6, cat_all6):
    assert cat6[0].sizes() == CONNECTED
    assert cat_all6[0].sizes() == ALL


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_connected_levels_match_brute_force(cat6, k):
    catalog = cat6[0]
    seen = set()
    for bits in range(1 << num_pairs(k)):
        g = graph_from_code(bits, k)
        if nx.is_connected(to_nx(g)):
            seen.add(canonical_form(g).bits)
    assert sorted(seen) == catalog.levels[k].tolist()


def test_ordinals_follow_canonical_order(cat6):
    catalog = cat6[0]
    # level 3: the path has the smaller code, the triangle the larger
    assert catalog.token(3, 0) == "3:3"
    assert catalog.token(3, 1) == "3:7"
    assert catalog.ordinal(3, 7) == 1
    with pytest.raises(ValueError):
        catalog.ordinal(3, 1)  # a single edge plus an isolated vertex


@pytest.mark.parametrize("universe", ["connected", "all"])
def test_dag_multiplicities_by_deletion(universe, cat6, cat_all6):
    catalog, dag = cat6 if universe == "connected" else cat_all6
    for k in range(2, 6):
        for j in range(catalog.size(k + 1)):
            child = catalog.graph(k + 1, j)
            expect = {}
            for v in range(k + 1):
                sub = induced_subgraph(child, [u for u in range(k + 1) if u != v])
                if universe == "connected" and not nx.is_connected(to_nx(sub)):
                    continue
                i = catalog.ordinal(k, canonical_form(sub).bits)
                expect[i] = expect.get(i, 0) + 1
            got = {i: s for i, s, _ in dag.parents(k + 1, j)}
            assert got == expect


def test_hand_weights(cat6):
    _, dag = cat6
    # the edge reaches the path by 2 endpoint deletions and the triangle by 3
    assert dag.children(2, 0) == [(0, 2, 0.4), (1, 3, 0.6)]
    W = dag.weight_matrix(4)
    assert np.allclose(W.sum(axis=1), 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.sampled_from(["connected", "all"]))
def test_push_forward_preserves_mass(level, seed, universe):
    catalog, dag = get_catalog(6, use_cache=False, universe=universe)
    p = np.random.default_rng(seed).dirichlet(np.full(catalog.size(level), 0.3))
    q = push_forward(Distribution(level, p / p.sum()), dag)
    assert q.level == level + 1
    assert abs(q.probs.sum() - 1.0) < 1e-12


def test_base_modes(cat6):
    catalog, dag = cat6
    c = CountVector(3, [3, 2])
    base = base_distribution(c, dag, "parent-mle")
    assert np.allclose(base.probs, push_forward(Distribution(3, [0.6, 0.4]), dag).probs)
    rec = base_distribution(c, dag, "recursive")
    assert rec is structural_prior(dag, 4)
    assert abs(rec.probs.sum() - 1) < 1e-12
    with pytest.raises(EstimationError):
        base_distribution(CountVector(3, [0, 0]), dag)
    with pytest.raises(ValueError):
        base_distribution(c, dag, "bogus")


def test_save_load_round_trip(tmp_path, cat_all6):
    catalog, dag = build_catalog(5), build_dag(build_catalog(5))
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    save_catalog(catalog, dag, a)
    save_catalog(*load_catalog(a), b)
    assert a.read_bytes() == b.read_bytes()
    c2, d2 = load_catalog(a)
    assert c2 == catalog and d2 == dag
    save_catalog(*cat_all6, a)
    assert load_catalog(a)[0].universe == "all"


@pytest.mark.parametrize("mangle", [
    lambda s: "not a catalog\n" + s,
    lambda s: s.rsplit("END", 1)[0],
    lambda s: s.replace("kmax=5", "kmax=x"),
])
def test_corrupt_catalog_files(tmp_path, mangle):
    p = tmp_path / "c.txt"
    save_catalog(build_catalog(5), build_dag(build_catalog(5)), p)
    p.write_text(mangle(p.read_text()))
    with pytest.raises(GraphFormatError):
        load_catalog(p)


def test_disk_cache(tmp_path):
    catalog, dag = get_catalog(4, cache_dir=tmp_path)
    assert (tmp_path / cache_file_name(4)).is_file()
    get_catalog(4, cache_dir=tmp_path, universe="all")
    assert (tmp_path / cache_file_name(4, "all")).is_file()
    fresh = load_catalog(tmp_path / cache_file_name(4))
    assert fresh[0] == catalog and fresh[1] == dag


@pytest.mark.parametrize("kmax", [2, 9, 5.0])
def test_kmax_range(kmax):
    with pytest.raises(ValueError):
        build_catalog(kmax)
