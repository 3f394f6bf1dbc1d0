"""Time the numba kernels against the interpreted fallback.

Each backend runs in its own interpreter (the switch is read at import
time). Every workload prints a digest of its output, and the script checks
that the two backends agree before reporting timings.

    python benchmarks/bench_backends.py [--repeat 3] [--graphs 40]
"""

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "MUTAG"

WORKER = r"""
import hashlib, json, sys, time
import numpy as np
from ssgk import get_catalog, parse_tu_dataset
from ssgk._jit import backend
from ssgk.kernel import gram_from_features
from ssgk.pyp import HpypChain, gibbs_fit
from ssgk.sampling import count_collection
from ssgk.smoothing import mle
from ssgk.svm import svm_train_binary

data, n_graphs, repeat = sys.argv[1], int(sys.argv[2]), int(sys.argv[3])
coll = parse_tu_dataset(data, "MUTAG")
coll.graphs, coll.labels = coll.graphs[:n_graphs], coll.labels[:n_graphs]
catalog, dag = get_catalog(5, use_cache=False)


def digest(arrs):
    h = hashlib.sha256()
    for a in arrs:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


def esu():
    return [v.counts for v in count_collection(coll, 5, catalog, samples=None, workers=1)]


def sample():
    return [v.counts for v in count_collection(coll, 5, catalog, samples=2000, workers=1)]


counts = count_collection(coll, 5, catalog, samples=None, workers=1)
F = np.vstack([mle(c).probs for c in counts])
K = gram_from_features(F).values
y = np.where(coll.labels > 0, 1.0, -1.0)


def svm():
    return [svm_train_binary(K, y, C=1.0).alpha]


lower = count_collection(coll, 2, catalog, samples=None, workers=1)


def pyp():
    out = []
    for i in range(3):
        base = mle(lower[i])
        chain = HpypChain(dag, 5, base, seed=i)
        out.append(gibbs_fit(chain, counts[i], sweeps=10, burn_in=5, seed=i, average=5).probs)
    return out


result = {"backend": backend()}
for name, fn in [("esu k=5", esu), ("expand sampling", sample), ("smo", svm), ("pyp gibbs", pyp)]:
    fn()  # warm-up: compile or load cached machine code
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    result[name] = {"seconds": best, "digest": digest(out)}
print(json.dumps(result))
"""


def run(disable_jit, graphs, repeat):
    env = dict(os.environ)
    env.pop("SSGK_DISABLE_JIT", None)
    if disable_jit:
        env["SSGK_DISABLE_JIT"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(DATA), str(graphs), str(repeat)],
                          env=env, capture_output=True, text=True)
    if proc.returncode:
        sys.exit(f"worker failed (SSGK_DISABLE_JIT={int(disable_jit)}):\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timed repetitions (best is kept)")
    ap.add_argument("--graphs", type=int, default=40, help="MUTAG graphs used per workload")
    args = ap.parse_args(argv)

    fast = run(False, args.graphs, args.repeat)
    slow = run(True, args.graphs, args.repeat)
    print(f"{'workload':<18} {'numba s':>10} {'python s':>10} {'speedup':>9}  outputs")
    ok = True
    for name in (k for k in fast if k != "backend"):
        a, b = fast[name], slow[name]
        same = a["digest"] == b["digest"]
        ok &= same
        print(f"{name:<18} {a['seconds']:>10.4f} {b['seconds']:>10.4f} "
              f"{b['seconds'] / max(a['seconds'], 1e-9):>8.1f}x  {'identical' if same else 'DIFFER'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
