import os
import subprocess
import sys

import numpy as np
import pytest

from ssgk import import_precomputed_kernel
from ssgk.cli import build_parser, main
from ssgk.vectors import read_vectors

from conftest import DATA


def run(argv, capsys):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog_command(tmp_path, capsys):
    code, out, _ = run(["catalog", "--kmax", 5], capsys)
    assert code == 0 and out.strip() == "2:1 3:2 4:6 5:21"
    code, out, _ = run(["catalog", "--kmax", 5, "--graphlets", "all"], capsys)
    assert out.strip() == "2:2 3:4 4:11 5:34"
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(["catalog", "--kmax", 6, "--out", a], capsys)
    run(["catalog", "--kmax", 6, "--out", b], capsys)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("kmax", [9, 2, "x"])
def test_catalog_kmax_out_of_range(kmax, capsys):
    code, _, err = run(["catalog", "--kmax", kmax], capsys)
    assert code == 2 and "--kmax" in err


def test_count_smooth_kernel_pipeline(tmp_path, capsys):
    counts, vecs, kern = tmp_path / "c.txt", tmp_path / "v.txt", tmp_path / "k.txt"
    base = ["count", "--data", DATA, "--dataset", "MUTAG", "--k", 4, "--samples", 200]
    assert run(base + ["--out", counts], capsys)[0] == 0
    again = tmp_path / "c2.txt"
    run(base + ["--out", again], capsys)
    assert counts.read_bytes() == again.read_bytes()

    data, sizes, meta = read_vectors(counts, with_meta=True)
    assert sizes == {3: 2, 4: 6}
    assert all(data[(i, 4)].sum() == 200 for i in range(188))
    assert meta["graphlets"] == "connected" and meta["samples"] == "200"

    code, _, _ = run(["smooth", "--counts", counts, "--method", "skn", "--d", 2, "--out", vecs],
                     capsys)
    assert code == 0
    sm, ssz, smeta = read_vectors(vecs, real=True, with_meta=True)
    assert ssz == {4: 6} and smeta["renormalize"] == "true" and smeta["method"] == "skn"
    assert all(abs(sm[(i, 4)].sum() - 1) < 1e-9 for i in range(188))

    assert run(["kernel", "--vectors", vecs, "--out", kern], capsys)[0] == 0
    K, labels = import_precomputed_kernel(kern)
    F = np.vstack([sm[(i, 4)] for i in range(188)])
    assert np.allclose(K, F @ F.T, atol=1e-15)
    assert (labels == 1).sum() == 125


def test_count_exhaustive_and_universe(tmp_path, capsys):
    out = tmp_path / "c.txt"
    code, _, _ = run(["count", "--data", DATA / "MUTAG", "--dataset", "MUTAG", "--k", 3,
                      "--exhaustive", "--graphlets", "all", "--no-lower", "--out", out], capsys)
    assert code == 0
    data, sizes = read_vectors(out)
    assert sizes == {3: 4}
    n = 17  # first MUTAG graph
    assert data[(0, 3)].sum() == n * (n - 1) * (n - 2) // 6


@pytest.mark.parametrize("extra,code", [
    (["--samples", 0], 2),
    (["--samples", 10, "--exhaustive"], 2),
    (["--sampling", "uniform"], 2),  # needs --graphlets all
    (["--bogus"], 2),
])
def test_count_usage_errors(tmp_path, capsys, extra, code):
    argv = ["count", "--data", DATA, "--dataset", "MUTAG", "--k", 4, "--out", tmp_path / "x"]
    assert run(argv + extra, capsys)[0] == code


def test_data_errors(tmp_path, capsys):
    code, _, err = run(["count", "--data", tmp_path, "--dataset", "MUTAG", "--k", 4,
                        "--out", tmp_path / "x"], capsys)
    assert code == 3 and "missing dataset file" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense\n")
    assert run(["smooth", "--counts", bad, "--out", tmp_path / "y"], capsys)[0] == 3


def test_numerical_error_exit_code(tmp_path, capsys):
    counts = tmp_path / "c.txt"
    run(["count", "--data", DATA, "--dataset", "MUTAG", "--k", 4, "--samples", 50,
         "--out", counts], capsys)
    code, _, err = run(["smooth", "--counts", counts, "--method", "skn", "--d", 30,
                        "--no-renormalize", "--out", tmp_path / "v"], capsys)
    assert code == 4 and "renormal" in err


def test_smooth_needs_its_levels(tmp_path, capsys):
    counts = tmp_path / "c.txt"
    run(["count", "--data", DATA, "--dataset", "MUTAG", "--k", 4, "--samples", 50, "--no-lower",
         "--out", counts], capsys)
    code, _, err = run(["smooth", "--counts", counts, "--method", "skn", "--out", tmp_path / "v"],
                       capsys)
    assert code == 2 and "--levels" in err


def test_eval_grid_rows(capsys):
    argv = ["eval", "--data", DATA, "--dataset", "MUTAG", "--k", 4, "--samples", 200,
            "--method", "skn", "--d-values", "0.5,5,50"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert [ln.split()[4] for ln in lines[:3]] == ["d=0.5", "d=5.0", "d=50.0"]
    assert lines[3].startswith("BEST dataset=MUTAG k=4 method=skn")
    assert lines[3].endswith("selection=test-folds")
    assert run(argv, capsys)[1] == out


def test_eval_k_sweep(capsys):
    code, out, _ = run(["eval", "--data", DATA, "--dataset", "MUTAG", "--k-sweep", "3,4",
                        "--samples", 100], capsys)
    assert code == 0
    assert [ln.split()[2] for ln in out.splitlines()] == ["k=3", "k=4"]


def test_eval_grid_requires_kneser_ney(capsys):
    code, _, _ = run(["eval", "--data", DATA, "--dataset", "MUTAG", "--d-grid"], capsys)
    assert code == 2


def test_plotdata(tmp_path, capsys):
    tri = tmp_path / "tri.txt"
    tri.write_text("3 3\n0 1\n1 2\n0 2\n")
    code, out, _ = run(["plotdata", "--graph", tri, "--k", 3], capsys)
    assert code == 0
    assert out.splitlines()[1:] == ["1 1"]
    argv = ["plotdata", "--data", DATA, "--dataset", "MUTAG", "--index", 3, "--k", 5]
    code, out, _ = run(argv, capsys)
    rows = [tuple(map(int, ln.split())) for ln in out.splitlines()[1:]]
    assert [f for _, f in rows] == sorted((f for _, f in rows), reverse=True)
    assert run(argv, capsys)[1] == out
    assert run(["plotdata", "--data", DATA, "--dataset", "MUTAG", "--index", 188], capsys)[0] == 2
    assert run(["plotdata", "--data", DATA, "--dataset", "MUTAG", "--index", -1], capsys)[0] == 2


def test_every_flag_is_documented():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.choices and "catalog" in a.choices)
    assert set(sub.choices) == {"catalog", "count", "smooth", "kernel", "eval", "plotdata"}
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text, (name, opt)
            if action.option_strings and action.dest != "help":
                assert action.help, (name, action.dest)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ssgk", "catalog", "--kmax", "4"],
                          capture_output=True, text=True, env=dict(os.environ))
    assert proc.returncode == 0 and proc.stdout.strip() == "2:1 3:2 4:6"
