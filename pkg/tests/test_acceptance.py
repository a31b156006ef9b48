"""End-to-end acceptance campaigns.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (visible even with
output capture on) and then asserts.  Failing grid points are listed on the
line so a failure is self-explanatory.
"""

import math

import pytest

from pmerge import bench
from pmerge.constructions import params
from pmerge.verify import (
    check_interval_inclusions,
    verify_column_equivalence,
    verify_column_theorems,
    verify_cw,
    verify_merger,
    verify_structure,
)

GRID = [(p, k) for p in (4, 5, 6) for k in range(p, 11)]
EXHAUSTIVE_THEOREM_POINTS = [(4, 4), (4, 5), (4, 6), (5, 5), (6, 6)]


@pytest.fixture
def report(capsys):
    def emit(n: int, title: str, bad: list, extra: str = "") -> None:
        status = "PASS" if not bad else "FAIL"
        line = f"ACCEPTANCE {n} {status}: {title}"
        if extra:
            line += f" [{extra}]"
        if bad:
            line += " failing: " + "; ".join(map(str, bad))
        with capsys.disabled():
            print("\n" + line)
        assert not bad, line

    return emit


def test_1_merger_exhaustive(report):
    bad, cases = [], 0
    for p, k in GRID:
        rep = verify_merger(p, k, trials=50)
        cases += rep.details["zero_one_cases"]
        assert rep.mode == "exhaustive"
        if not rep.passed:
            bad.append(f"({p},{k}) {rep.failure_count} failures")
    report(1, "b-1 passes of M^p_k merge every two-sorted 0-1 input", bad, f"{len(GRID)} points, {cases} cases")


def test_2_structure_and_time_bounds(report):
    bad = []
    for p, k in GRID:
        rep = verify_structure(p, k)
        if rep.details["delay"] != p:
            bad.append(f"({p},{k}) delay {rep.details['delay']}")
        prm = params(p, k)
        bound = 2 * p / (p - 2) * math.log2(prm.N) + p * (p - 8) / (p - 2)
        if not prm.merge_stages <= bound:
            bad.append(f"({p},{k}) time {prm.merge_stages} > {bound:.3f}")
        if p == 4 and not prm.merge_stages <= 4 * k - 8:
            bad.append(f"({p},{k}) time {prm.merge_stages} > 4k-8")
        if not rep.passed:
            bad.append(f"({p},{k}) {[f.get('check') for f in rep.failures]}")
    report(2, "delay p, stage columns, running-time bounds", bad, f"{len(GRID)} points")


def test_3_column_equivalence(report):
    bad, modes = [], set()
    for p, k in GRID:
        rep = verify_column_equivalence(p, k, trials=10**4, seed=0)
        modes.add(rep.mode)
        if rep.mode == "sampled":
            assert rep.cases >= 10**4
        if not rep.passed:
            bad.append(f"({p},{k}) {rep.failure_count} mismatches")
    report(3, "register and column-count simulations agree", bad, "/".join(sorted(modes)))


def test_4_proof_invariants(report):
    bad = []
    for k in range(3, 11):
        for f in check_interval_inclusions(k):
            bad.append(f"intervals k={k} {f}")
    for p, k in GRID:
        rep = verify_column_theorems(p, k, trials=10**5, seed=0)
        if (p, k) in EXHAUSTIVE_THEOREM_POINTS:
            assert rep.mode == "exhaustive"
        else:
            assert rep.mode == "exhaustive" or rep.details["balanced_cases"] >= 10**5
        if not rep.passed:
            parts = sorted({f.get("part") for f in rep.failures})
            steps = rep.details.get("containment_violations_by_step", {})
            bad.append(f"({p},{k}) {rep.mode} {rep.failure_count} failures {parts} by step {steps}")
    report(4, "interval facts, trace containment, terminal states, flatness", bad)


def test_5_cw(report):
    bad = []
    for k in range(1, 7):
        rep = verify_cw(k, samples=10**5, seed=0)
        if k <= 4:
            assert rep.details["sort_mode"] == "exhaustive"
        if not rep.passed:
            bad.append(f"k={k} {rep.failures[:2]}")
    report(5, "CW_k merges in one pass and sorts in k passes", bad, "k=1..6")


def test_6_sorting_time(report):
    bad, ratios = [], []
    for p in (4, 5):
        for k in (9, 10):
            r = bench.bench_sort(p, k, trials=1000, seed=0)
            ratio = r.avg_stages / r.log2N_sq
            ratios.append(f"({p},{k}) {ratio:.3f}")
            if not 0.5 <= ratio <= 1.5:
                bad.append(f"({p},{k}) avg {r.avg_stages} vs log2^2 N {r.log2N_sq}")
    report(6, "average sorting stages within [0.5, 1.5] log2^2 N", bad, ", ".join(ratios))


def test_7_determinism(report, tmp_path):
    campaigns = {
        "merger": lambda: verify_merger(4, 7, trials=100, seed=5).to_json(),
        "columns": lambda: verify_column_equivalence(5, 9, trials=2000, seed=5).to_json(),
        "theorems": lambda: verify_column_theorems(6, 10, trials=5000, seed=5).to_json(),
        "cw": lambda: verify_cw(6, samples=5000, seed=5).to_json(),
        "bench": lambda: bench.results_csv([bench.bench_sort(4, 8, trials=200, seed=5)]),
        "svg": lambda: bench.emit_results(
            [bench.bench_sort(4, k, trials=20, seed=5) for k in (5, 6)], tmp_path / "x.svg"
        ).read_bytes(),
    }
    bad = [name for name, run in campaigns.items() if run() != run()]
    report(7, "seeded campaigns reproduce byte-identical reports", bad, ", ".join(campaigns))
