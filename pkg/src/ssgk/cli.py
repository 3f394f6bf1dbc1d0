"""Command-line front end: ``ssgk {catalog,count,smooth,kernel,eval,plotdata}``.

Stages talk through files (counts -> vectors -> precomputed kernel) so each
one can be rerun on its own. Exit codes: 0 ok, 2 usage, 3 data/format,
4 numerical or estimation failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .catalog import BASE_MODES, MAX_KMAX, UNIVERSES, build_catalog, build_dag, get_catalog, \
    save_catalog
from .errors import (ChainStateError, EstimationError, GraphFormatError, IngestionError,
                     SamplingError, TrainingError)
from .evaluation import best_on_grid, discount_sweep, size_sweep
from .graph import parse_edge_list, parse_tu_dataset
from .kernel import FeatureConfig, _count_one, export_precomputed_kernel, gram_from_features, \
    smooth_collection
from .sampling import SAMPLING_METHODS, count_collection, powerlaw_table
from .smoothing import DISCOUNT_GRID, METHODS, SmoothingConfig
from .vectors import CountVector, read_vectors, write_vectors

log = logging.getLogger("ssgk")

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated pipeline settings for one ``count`` or ``eval`` run."""
    data: str
    dataset: str
    features: FeatureConfig
    graphlets: str = "connected"
    grid: tuple | None = None
    ks: tuple | None = None
    folds: int = 5
    C: float = 1.0
    cv_seed: int = 0
    workers: int | None = None
    cache_dir: str | None = None

    def __post_init__(self):
        if self.graphlets not in UNIVERSES:
            raise ValueError(f"--graphlets must be one of {UNIVERSES}")
        if self.folds < 2:
            raise ValueError("--folds must be >= 2")
        if not self.C > 0:
            raise ValueError("--C must be positive")
        if self.workers is not None and self.workers < 1:
            raise ValueError("--workers must be >= 1")
        if self.graphlets == "connected" and self.features.sampling == "uniform":
            raise ValueError("--sampling uniform counts disconnected subsets; use --graphlets all")
        for k in self.ks or (self.features.k,):
            if not 2 <= k <= MAX_KMAX:
                raise ValueError(f"k must lie in 2..{MAX_KMAX}")
            replace(self.features, k=k)  # re-runs the per-k checks

    @property
    def kmax(self) -> int:
        return max(3, *(self.ks or (self.features.k,)))


# ---------------------------------------------------------------- argument types

def _int_range(lo, hi):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"must lie in {lo}..{hi}, got {v}")
        return v
    return parse


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _float_list(text):
    try:
        vals = tuple(float(t) for t in text.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text):
    try:
        vals = tuple(int(t) for t in text.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


# ---------------------------------------------------------------- shared flags

def _add_data(p, required=True):
    p.add_argument("--data", default=os.environ.get("SSGK_DATA_DIR", "."),
                   help="directory holding the dataset (either DIR/NAME_A.txt or "
                        "DIR/NAME/NAME_A.txt); default $SSGK_DATA_DIR or the current directory")
    p.add_argument("--dataset", required=required, help="dataset name, e.g. MUTAG")


def _add_catalog(p):
    p.add_argument("--graphlets", choices=UNIVERSES, default="connected",
                   help="graphlet universe: connected graphlets only, or all graphs including "
                        "disconnected ones (default: connected)")
    p.add_argument("--cache-dir", default=None,
                   help="catalog cache directory (default $SSGK_CACHE_DIR or ~/.cache/ssgk)")


def _add_counting(p, default_samples=10_000):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--samples", type=_positive_int, default=default_samples,
                   help=f"subgraphs sampled per graph (default {default_samples})")
    g.add_argument("--exhaustive", action="store_true",
                   help="count every k-vertex subgraph instead of sampling")
    p.add_argument("--sampling", choices=SAMPLING_METHODS, default="expand",
                   help="sampler: expand (grow a connected set), reject (uniform k-subsets "
                        "kept if connected) or uniform (all k-subsets; needs --graphlets all); "
                        "default expand")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def _add_smoothing(p):
    p.add_argument("--method", choices=METHODS, default="mle",
                   help="estimator: mle, laplace, kn (uniform base), skn (structural "
                        "Kneser-Ney) or pyp (hierarchical Pitman-Yor); default mle")
    p.add_argument("--d", type=float, default=1.0, help="Kneser-Ney discount (default 1)")
    p.add_argument("--base-mode", choices=BASE_MODES, default="parent-mle",
                   help="structural base: parent-mle pushes the level below through the DAG; "
                        "recursive pushes a uniform lowest level all the way up")
    p.add_argument("--no-renormalize", action="store_true",
                   help="fail instead of rescaling when a large discount breaks normalisation")
    p.add_argument("--pyp-d", type=float, default=0.5, help="Pitman-Yor discount (default 0.5)")
    p.add_argument("--pyp-theta", type=float, default=1.0,
                   help="Pitman-Yor strength (default 1)")
    p.add_argument("--sweeps", type=int, default=100, help="Gibbs sweeps in total (default 100)")
    p.add_argument("--burn-in", type=int, default=50,
                   help="sweeps discarded before averaging (default 50)")
    p.add_argument("--average", type=int, default=10,
                   help="trailing sweeps averaged into the predictive (default 10)")
    p.add_argument("--base-level", type=int, default=2,
                   help="lowest restaurant level; its base is the MLE of that level (default 2)")


def _add_workers(p):
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads (default: available cores)")


def _smoothing_config(args) -> SmoothingConfig:
    return SmoothingConfig(method=args.method, d=args.d, base_mode=args.base_mode,
                           renormalize=not args.no_renormalize, pyp_d=args.pyp_d,
                           pyp_theta=args.pyp_theta, sweeps=args.sweeps, burn_in=args.burn_in,
                           average=args.average, base_level=args.base_level)


def _load_dataset(data, name):
    root = Path(data)
    if not (root / f"{name}_A.txt").is_file() and (root / name / f"{name}_A.txt").is_file():
        root = root / name
    return parse_tu_dataset(root, name)


def _catalog(kmax, universe, cache_dir):
    return get_catalog(kmax, cache_dir=cache_dir, universe=universe)


# ---------------------------------------------------------------- commands

def cmd_catalog(args) -> int:
    catalog = build_catalog(args.kmax, args.graphlets)
    dag = build_dag(catalog)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_catalog(catalog, dag, out)
    print(" ".join(f"{k}:{n}" for k, n in sorted(catalog.sizes().items())))
    return 0


def cmd_count(args) -> int:
    features = FeatureConfig(k=args.k, samples=None if args.exhaustive else args.samples,
                             sampling=args.sampling, seed=args.seed)
    run = RunConfig(args.data, args.dataset, features, graphlets=args.graphlets,
                    workers=args.workers, cache_dir=args.cache_dir)
    levels = [args.k] if args.no_lower or args.k < 3 else [args.k - 1, args.k]
    if args.levels:
        levels = sorted(set(args.levels))
        if any(not 2 <= m <= MAX_KMAX for m in levels):
            raise UsageError(f"--levels must lie in 2..{MAX_KMAX}")
    collection = _load_dataset(run.data, run.dataset)
    catalog, _ = _catalog(max(3, *levels), run.graphlets, run.cache_dir)
    rows = []
    for m in levels:
        vecs = count_collection(collection, m, catalog, samples=features.samples,
                                seed=features.seed, method=features.sampling, workers=run.workers)
        rows.extend((i, m, v.counts) for i, v in enumerate(vecs))
    rows.sort(key=lambda r: (r[0], r[1]))
    meta = {"dataset": run.dataset, "graphlets": run.graphlets, "k": args.k,
            "samples": features.samples or "exhaustive", "sampling": features.sampling,
            "seed": features.seed,
            "labels": ",".join(str(int(x)) for x in collection.labels)}
    write_vectors(args.out, rows, {m: catalog.size(m) for m in levels}, meta=meta)
    print(f"wrote {len(collection)} graphs x levels {','.join(map(str, levels))} to {args.out}")
    return 0


def _read_meta_labels(meta, path):
    if not meta.get("labels"):
        raise GraphFormatError(f"{path}: no class labels in the '# meta' line")
    return np.array([int(x) for x in meta["labels"].split(",")], dtype=np.int64)


def cmd_smooth(args) -> int:
    smoothing = _smoothing_config(args)
    vecs, sizes, meta = read_vectors(args.counts, with_meta=True)
    k = args.k or max(sizes)
    if k not in sizes:
        raise UsageError(f"{args.counts} holds no level-{k} counts")
    universe = meta.get("graphlets", "connected")
    catalog, dag = _catalog(max(3, k), universe, args.cache_dir)
    for m, n in sizes.items():
        if catalog.size(m) != n:
            raise GraphFormatError(f"{args.counts}: level {m} has {n} graphlets, the "
                                   f"{universe} catalog has {catalog.size(m)}")
    FeatureConfig(k=k, smoothing=smoothing)  # precondition checks
    need = {k}
    if smoothing.method == "skn":
        need.add(k - 1)
    elif smoothing.method == "pyp":
        need.add(smoothing.base_level)
    missing = sorted(need - set(sizes))
    if missing:
        raise UsageError(f"{smoothing.method} needs level(s) {missing} in {args.counts}; "
                         "rerun count with --levels")
    idx = sorted({gi for gi, m in vecs if m == k})
    counts = {m: [CountVector(m, vecs[(gi, m)]) for gi in idx] for m in need}
    F = smooth_collection(counts, dag, smoothing, k, args.seed, args.workers)
    meta = dict(meta)
    meta.update(method=smoothing.method, d=smoothing.d if smoothing.method in ("kn", "skn") else "",
                renormalize=str(smoothing.renormalize).lower())
    write_vectors(args.out, ((gi, k, F[r]) for r, gi in enumerate(idx)), {k: sizes[k]},
                  real=True, meta={key: v for key, v in meta.items() if v != ""})
    print(f"wrote {len(idx)} level-{k} {smoothing.method} vectors to {args.out}")
    return 0


def cmd_kernel(args) -> int:
    vecs, sizes, meta = read_vectors(args.vectors, real=True, with_meta=True)
    if len(sizes) != 1:
        raise GraphFormatError(f"{args.vectors}: expected a single level, found {sorted(sizes)}")
    (k,) = sizes
    idx = sorted(gi for gi, _ in vecs)
    F = np.vstack([vecs[(gi, k)] for gi in idx]) if idx else np.zeros((0, sizes[k]))
    if args.dataset:
        labels = _load_dataset(args.data, args.dataset).labels
    else:
        labels = _read_meta_labels(meta, args.vectors)
    if len(labels) != len(idx):
        raise GraphFormatError(f"{len(labels)} labels for {len(idx)} vectors")
    export_precomputed_kernel(gram_from_features(F), labels[idx], args.out)
    print(f"wrote {len(idx)}x{len(idx)} kernel to {args.out}")
    return 0


def _emit(report, dataset, extra=""):
    line = report.result_line(dataset)
    print(line + (f" {extra}" if extra else ""))
    log.info("folds: %s", " ".join(f"{a:.2f}" for a in report.accuracies))


def cmd_eval(args) -> int:
    smoothing = _smoothing_config(args)
    if args.d_values:
        grid = args.d_values
    elif args.d_grid:
        grid = DISCOUNT_GRID
    else:
        grid = None
    if grid is not None and smoothing.method not in ("kn", "skn"):
        raise UsageError("a discount grid only applies to --method kn or skn")
    features = FeatureConfig(k=args.k, samples=None if args.exhaustive else args.samples,
                             sampling=args.sampling, seed=args.seed, smoothing=smoothing)
    run = RunConfig(args.data, args.dataset, features, graphlets=args.graphlets, grid=grid,
                    ks=args.k_sweep, folds=args.folds, C=args.C,
                    cv_seed=args.cv_seed if args.cv_seed is not None else args.seed,
                    workers=args.workers, cache_dir=args.cache_dir)
    collection = _load_dataset(run.data, run.dataset)
    catalog, dag = _catalog(run.kmax, run.graphlets, run.cache_dir)
    name = collection.name or run.dataset
    for k in run.ks or (features.k,):
        cfg = replace(features, k=k)
        if grid is None:
            (_, report), = size_sweep(collection, catalog, dag, cfg, [k], run.folds, run.cv_seed,
                                      run.C, run.workers)
            _emit(report, name)
            continue
        rows = discount_sweep(collection, catalog, dag, cfg, grid, run.folds, run.cv_seed, run.C,
                              run.workers)
        for _, report in rows:
            _emit(report, name)
        _, best = best_on_grid(rows)
        line = best.result_line(name).replace("RESULT", "BEST", 1)
        print(f"{line} selection=test-folds")
    return 0


def cmd_plotdata(args) -> int:
    if args.graph:
        g = parse_edge_list(Path(args.graph).read_text(encoding="utf-8"))
        index = 0
    else:
        if args.index is None:
            raise UsageError("give --graph FILE or --dataset NAME with --index I")
        collection = _load_dataset(args.data, args.dataset)
        if not 0 <= args.index < len(collection):
            raise UsageError(f"--index must lie in 0..{len(collection) - 1}")
        g, index = collection[args.index], args.index
    if args.sampling == "uniform" and args.graphlets != "all":
        raise UsageError("--sampling uniform needs --graphlets all")
    catalog, _ = _catalog(max(3, args.k), args.graphlets, args.cache_dir)
    # same per-graph stream as 'count', so the table matches the count file
    cfg = FeatureConfig(k=args.k, samples=args.samples, sampling=args.sampling, seed=args.seed)
    counts = _count_one(g, index, args.k, catalog, cfg)
    print("# rank frequency")
    for rank, freq in powerlaw_table(counts):
        print(f"{rank} {freq}")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssgk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging (repeat for debug output)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("catalog", help="build the graphlet catalog and DAG")
    p.add_argument("--kmax", type=_int_range(3, MAX_KMAX), required=True,
                   help=f"largest graphlet size, 3..{MAX_KMAX}")
    p.add_argument("--out", help="write catalog and DAG to this file")
    p.add_argument("--graphlets", choices=UNIVERSES, default="connected",
                   help="graphlet universe (default: connected)")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("count", help="write graphlet count vectors for a dataset")
    _add_data(p)
    p.add_argument("--k", type=_int_range(2, MAX_KMAX), required=True, help="graphlet size")
    _add_counting(p)
    _add_catalog(p)
    p.add_argument("--no-lower", action="store_true",
                   help="skip the level k-1 counts that structural smoothing needs")
    p.add_argument("--levels", type=_int_list, default=None,
                   help="explicit comma-separated levels to count (overrides k-1,k)")
    _add_workers(p)
    p.add_argument("--out", required=True, help="output count-vector file")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("smooth", help="turn count vectors into smoothed distributions")
    p.add_argument("--counts", required=True, help="count-vector file written by 'count'")
    p.add_argument("--k", type=_int_range(2, MAX_KMAX), default=None,
                   help="level to smooth (default: highest level in the file)")
    _add_smoothing(p)
    p.add_argument("--seed", type=int, default=0, help="seed for the Pitman-Yor chains")
    p.add_argument("--cache-dir", default=None, help="catalog cache directory")
    _add_workers(p)
    p.add_argument("--out", required=True, help="output real-valued vector file")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("kernel", help="Gram matrix of smoothed vectors, precomputed-kernel format")
    p.add_argument("--vectors", required=True, help="vector file written by 'smooth'")
    _add_data(p, required=False)
    p.add_argument("--out", required=True, help="output kernel file")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("eval", help="cross-validated SVM accuracy")
    _add_data(p)
    p.add_argument("--k", type=_int_range(2, MAX_KMAX), default=5, help="graphlet size (default 5)")
    _add_counting(p)
    _add_catalog(p)
    _add_smoothing(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--d-grid", action="store_true",
                   help="sweep the standard discount grid and report the best row")
    g.add_argument("--d-values", type=_float_list, default=None,
                   help="sweep these comma-separated discounts instead")
    p.add_argument("--k-sweep", type=_int_list, default=None,
                   help="comma-separated graphlet sizes to evaluate in turn")
    p.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    p.add_argument("--C", type=float, default=1.0, help="SVM cost (default 1)")
    p.add_argument("--cv-seed", type=int, default=None,
                   help="seed of the fold split (default: --seed)")
    _add_workers(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plotdata", help="rank-frequency table of one graph's graphlets")
    _add_data(p, required=False)
    p.add_argument("--index", type=int, default=None, help="0-based graph index in the dataset")
    p.add_argument("--graph", default=None, help="edge-list file instead of a dataset graph")
    p.add_argument("--k", type=_int_range(2, MAX_KMAX), default=5, help="graphlet size (default 5)")
    p.add_argument("--samples", type=_positive_int, default=None,
                   help="sample this many subgraphs (default: exhaustive)")
    p.add_argument("--sampling", choices=SAMPLING_METHODS, default="expand",
                   help="sampler when --samples is given (default expand)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    _add_catalog(p)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ssgk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, GraphFormatError, OSError) as exc:
        print(f"ssgk {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EstimationError, SamplingError, ChainStateError, TrainingError) as exc:
        print(f"ssgk {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
