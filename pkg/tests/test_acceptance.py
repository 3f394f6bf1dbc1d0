"""Acceptance criteria, each at its stated tolerance; one pass/fail line apiece.

The end-to-end runs (criteria 5 and 6) count graphlets over all k-vertex
graphs with uniformly drawn k-subsets. Counting connected graphlets only
leaves every MUTAG configuration at the majority-class rate, well outside the
target band. PTC is read from ``$SSGK_DATA_DIR``; without it criterion 6 fails
and says so.
"""

import os
import time
from pathlib import Path

import networkx as nx
import numpy as np
from cvxopt import matrix, solvers

from ssgk import (CountVector, Distribution, FeatureConfig, HpypChain, SmoothingConfig,
                  build_catalog, cross_validate, delete_customer, discount_sweep,
                  get_catalog, insert_customer, mle, parse_tu_dataset, push_forward,
                  structural_kneser_ney)
from ssgk.canonical import canonicalize_many, graph_from_code, num_pairs
from ssgk.catalog import extend_level
from ssgk.evaluation import best_on_grid
from ssgk.sampling import count_collection, enumerate_all_subgraphs, loglog_slope, powerlaw_table
from ssgk.smoothing import DISCOUNT_GRID
from ssgk.svm import svm_train_binary

from conftest import to_nx

PROTOCOL = dict(k=5, samples=10_000, sampling="uniform", seed=0)


def _connected_classes(k):
    """Brute-force oracle: canonical codes of every connected labelled graph on k vertices."""
    codes = np.arange(1 << num_pairs(k), dtype=np.int64)
    keep = [c for c in codes.tolist() if nx.is_connected(to_nx(graph_from_code(c, k)))]
    return np.unique(canonicalize_many(np.array(keep, dtype=np.int64), k))


def test_criterion_1_catalog_counts(criterion):
    t0 = time.perf_counter()
    catalog = build_catalog(7)
    expect = {2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853}
    ok = catalog.sizes() == expect
    for k in range(2, 7):
        ok &= np.array_equal(_connected_classes(k), catalog.levels[k])
    # level 7: extending level 6 reproduces it, and extending twice adds nothing new
    again = extend_level(catalog.levels[6], 6)
    ok &= np.array_equal(again, catalog.levels[7])
    ok &= np.array_equal(extend_level(extend_level(catalog.levels[5], 5), 6), catalog.levels[7])
    elapsed = time.perf_counter() - t0
    criterion(1, "catalog sizes 1,2,6,21,112,853", ok and elapsed < 60,
              f"{catalog.sizes()} in {elapsed:.1f}s")


def test_criterion_2_push_forward_mass(criterion):
    catalog, dag = get_catalog(7)
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in range(2, 7):
        for _ in range(100):
            p = rng.dirichlet(np.full(catalog.size(k), rng.uniform(0.05, 2.0)))
            q = push_forward(Distribution(k, p), dag)
            worst = max(worst, abs(q.probs.sum() - 1.0))
    criterion(2, "push-forward preserves probability mass", worst < 1e-9, f"max |sum - 1| = {worst:.2e}")


def test_criterion_3_small_discount_is_mle(criterion):
    catalog, dag = get_catalog(6)
    rng = np.random.default_rng(1)
    cfg = SmoothingConfig(method="skn", d=1e-12)
    worst = 0.0
    for _ in range(100):
        top = CountVector(5, rng.poisson(rng.uniform(0.2, 20), catalog.size(5)) + (rng.random(21) < 0.1))
        if top.total == 0:
            top = CountVector(5, np.eye(21, dtype=int)[0])
        lower = CountVector(4, rng.integers(1, 50, catalog.size(4)))
        p = structural_kneser_ney(top, lower, dag, cfg)
        worst = max(worst, np.abs(p.probs - mle(top).probs).max())
    criterion(3, "SKN with d=1e-12 equals MLE", worst < 1e-9, f"max-norm {worst:.2e}")


def test_criterion_4_hand_computed_skn(criterion):
    _, dag = get_catalog(6)
    p = structural_kneser_ney(CountVector(3, [3, 2]), CountVector(2, [5]), dag,
                              SmoothingConfig(method="skn", d=1.0))
    err = np.abs(p.probs - [0.56, 0.44]).max()
    criterion(4, "SKN level-3 (3,2), d=1 -> (0.56, 0.44)", err < 1e-12, f"got {p.probs.tolist()}")


def _end_to_end(collection, mle_target, kn_target):
    catalog, dag = get_catalog(5, universe="all")
    t0 = time.perf_counter()
    base = FeatureConfig(**PROTOCOL)
    m = cross_validate(collection, catalog, dag, base, folds=5, seed=0, C=1.0)
    skn = FeatureConfig(**PROTOCOL, smoothing=SmoothingConfig(method="skn"))
    rows = discount_sweep(collection, catalog, dag, skn, DISCOUNT_GRID, folds=5, seed=0, C=1.0)
    d, best = best_on_grid(rows)
    elapsed = time.perf_counter() - t0
    ok_mle = abs(m.mean - mle_target) <= 5.0
    ok_kn = abs(best.mean - kn_target) <= 5.0 and best.mean >= m.mean - 1.0
    detail = (f"MLE {m.mean:.2f}+-{m.std:.2f} (target {mle_target}), best SKN {best.mean:.2f}"
              f"+-{best.std:.2f} at d={d:g} (target {kn_target}), {elapsed:.0f}s")
    return ok_mle and ok_kn, elapsed, detail


def test_criterion_5_mutag_end_to_end(criterion, mutag):
    ok, elapsed, detail = _end_to_end(mutag, 80.34, 82.98)
    criterion(5, "MUTAG k=5 MLE and best-on-grid KN accuracy", ok and elapsed < 600, detail)


def _find_ptc():
    root = os.environ.get("SSGK_DATA_DIR")
    if not root:
        return None
    for name in ("PTC_MR", "PTC"):
        for d in (Path(root), Path(root) / name):
            if (d / f"{name}_A.txt").is_file():
                return d, name
    return None


def test_criterion_6_ptc_end_to_end(criterion):
    found = _find_ptc()
    if found is None:
        criterion(6, "PTC k=5 MLE and best-on-grid KN accuracy", False,
                  "PTC_MR not found under $SSGK_DATA_DIR; dataset is not shipped with the package")
    collection = parse_tu_dataset(*found)
    ok, _, detail = _end_to_end(collection, 57.26, 59.87)
    criterion(6, "PTC k=5 MLE and best-on-grid KN accuracy", ok, detail)


def test_criterion_7_exhaustive_median(criterion, mutag):
    catalog, _ = get_catalog(5, universe="all")
    totals = [c.total for c in count_collection(mutag, 5, catalog, samples=None)]
    med = float(np.median(totals))
    connected, _ = get_catalog(5)
    conn = float(np.median([c.total for c in count_collection(mutag, 5, connected, samples=None)]))
    criterion(7, "MUTAG k=5 exhaustive median count near 7378", abs(med - 7378) <= 0.05 * 7378,
              f"median {med:.1f} over all 5-subsets (connected-only median {conn:.1f})")


def test_criterion_8_pyp_soundness(criterion):
    _, dag = get_catalog(6)
    point = Distribution(2, [1.0])
    chain = HpypChain(dag, 5, point, seed=0)
    rng = np.random.default_rng(0)
    worst = 0.0
    for step in range(10_000):
        level = int(rng.integers(3, 6))
        if chain.num_direct(level) and rng.random() < 0.45:
            delete_customer(chain, level)
        elif rng.random() < 0.5:
            insert_customer(chain, level, observed=int(rng.integers(0, dag.catalog.size(level))))
        else:
            insert_customer(chain, level)
        if step % 250 == 0:
            for m in (3, 4, 5):
                worst = max(worst, abs(chain.predictive(m).probs.sum() - 1))
    chain.check_consistency()  # raises on any cross-level mismatch

    gen = HpypChain(dag, 4, point, d=0.0, theta=1e6, seed=1)
    draws = np.bincount([insert_customer(gen, 4) for _ in range(50_000)], minlength=6)
    target = push_forward(push_forward(point, dag), dag).probs
    l1 = np.abs(draws / draws.sum() - target).sum()
    criterion(8, "PYP sums, consistency after 10k ops, d=0 draws follow the base",
              worst < 1e-9 and l1 < 0.05, f"max |sum - 1| {worst:.1e}, L1 {l1:.4f}")


def test_criterion_9_svm_dual(criterion):
    solvers.options["show_progress"] = False
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(30):
        X = rng.normal(size=(10, 4))
        y = np.where(rng.random(10) < 0.5, -1.0, 1.0)
        y[:2] = [-1.0, 1.0]
        K = X @ X.T
        n = 10
        sol = solvers.qp(matrix(np.outer(y, y) * K), matrix(-np.ones(n)),
                         matrix(np.vstack([-np.eye(n), np.eye(n)])),
                         matrix(np.hstack([np.zeros(n), np.ones(n)])),
                         matrix(y.reshape(1, -1)), matrix(0.0),
                         options={"abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12})
        ours = svm_train_binary(K, y, C=1.0).objective
        worst = max(worst, abs(ours - sol["primal objective"]))
    criterion(9, "SMO dual objective vs QP reference", worst < 1e-4, f"max gap {worst:.2e}")


def test_criterion_10_power_law(criterion, mutag):
    # same counting as the end-to-end protocol: every 5-subset of the first graph
    catalog, _ = get_catalog(5, universe="all")
    table = powerlaw_table(enumerate_all_subgraphs(mutag[0], 5, catalog))
    freqs = [f for _, f in table]
    monotone = all(a >= b for a, b in zip(freqs, freqs[1:]))
    slope = loglog_slope(table)
    criterion(10, "rank-frequency non-increasing with negative log-log slope",
              monotone and slope < 0, f"{len(table)} ranks, slope {slope:.2f}")
