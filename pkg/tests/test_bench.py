import csv
import io
import math

import numpy as np
import pytest

from pmerge import bench
from pmerge.constructions import params
from pmerge.simulator import VerificationFailure, sort_until_done


def test_identity_input_takes_one_pass():
    prm = params(4, 5)
    r = bench.bench_sort(4, 5, inputs=[list(range(1, prm.N + 1))])
    assert (r.trials, r.avg_stages, r.max_stages, r.avg_passes) == (1, 4, 4, 1)


def test_permutation_is_uniform_permutation_and_seeded():
    a = bench.permutation(50, 7, 3)
    assert sorted(a.tolist()) == list(range(1, 51))
    assert (a == bench.permutation(50, 7, 3)).all()
    assert not (a == bench.permutation(50, 7, 4)).all()


def test_bench_matches_scalar_runs():
    prm = params(4, 5)
    r = bench.bench_sort(4, 5, trials=30, seed=2, chunk=7)
    passes = [sort_until_done(4, 5, bench.permutation(prm.N, 2, t).tolist()).passes_executed for t in range(30)]
    assert r.avg_passes == pytest.approx(np.mean(passes))
    assert r.max_passes == max(passes)
    assert r.avg_stages == pytest.approx(4 * np.mean(passes))
    assert r.avg_stages <= r.max_stages
    assert r.log2N_sq == pytest.approx(math.log2(prm.N) ** 2, abs=1e-6)


def test_bench_deterministic_across_chunking(monkeypatch):
    a = bench.bench_sort(5, 6, trials=40, seed=9, chunk=40)
    monkeypatch.setenv("NETS_THREADS", "1")
    b = bench.bench_sort(5, 6, trials=40, seed=9, chunk=6)
    assert a == b


def test_bench_rejects_bad_trials():
    with pytest.raises(ValueError):
        bench.bench_sort(4, 5, trials=0)


def test_bench_flags_unsorted(monkeypatch):
    from pmerge.network import Network, Stage

    monkeypatch.setattr(bench, "build_m", lambda p, k, allow_p3=False: Network(60, (Stage(),)))
    with pytest.raises(VerificationFailure):
        bench.bench_sort(4, 5, inputs=[list(range(60, 0, -1))])


def test_csv_single_row(tmp_path):
    r = bench.bench_sort(4, 4, trials=5)
    path = bench.emit_results([r], tmp_path / "out.csv")
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert rows[0] == bench.CSV_HEADER and len(rows) == 2


def test_csv_grid_rows():
    results = [bench.bench_sort(p, k, trials=3) for p in (4, 5) for k in (5, 6, 7, 8)]
    assert len(bench.results_csv(results).strip().splitlines()) == 9


def test_svg(tmp_path):
    results = [bench.bench_sort(4, k, trials=3) for k in (4, 5)]
    a = bench.emit_results(results, tmp_path / "a.svg").read_text()
    b = bench.emit_results(results, tmp_path / "b.svg").read_text()
    assert a.lstrip().startswith("<?xml") and "<svg" in a
    assert a == b


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError):
        bench.emit_results([], tmp_path / "x.csv")
    r = bench.bench_sort(4, 4, trials=2)
    with pytest.raises(ValueError):
        bench.emit_results([r], tmp_path / "x.txt")


def test_merge_times():
    rows = bench.merge_times([4], [4, 5, 9])
    assert [r["merge_stages"] for r in rows] == [4, 12, 28]
    assert all(r["merge_stages"] <= r["bound"] + 1e-9 for r in rows)
    assert bench.merge_times_csv(rows).splitlines()[0] == ",".join(bench.MERGE_HEADER)
    assert bench.merge_times([6], [4]) == []
