"""Early-stopped sorting times of random permutations on M^p_k."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .constructions import build_m, params
from .simulator import VerificationFailure, sort_batch

CSV_HEADER = ["p", "k", "N", "trials", "seed", "avg_stages", "max_stages", "avg_passes", "max_passes", "log2N_sq"]
MERGE_HEADER = ["p", "k", "N", "log2N", "merge_stages", "bound", "stages_per_log2N"]


@dataclass(frozen=True)
class BenchResult:
    p: int
    k: int
    N: int
    trials: int
    seed: int
    avg_stages: float
    max_stages: int
    avg_passes: float
    max_passes: int
    log2N_sq: float


def workers() -> int:
    env = os.environ.get("NETS_THREADS")
    cap = int(env) if env else os.cpu_count() or 1
    return max(1, cap)


def permutation(n: int, seed: int, trial: int) -> np.ndarray:
    """Uniform permutation of 1..n from the substream ``(seed, trial)``."""
    return np.random.default_rng([seed, trial]).permutation(n) + 1


def _run_chunk(p: int, k: int, allow_p3: bool, seed: int, trial_ids: Sequence[int]) -> np.ndarray:
    prm = params(p, k, allow_p3)
    net = build_m(p, k, allow_p3)
    x = np.stack([permutation(prm.N, seed, t) for t in trial_ids]).astype(np.int32)
    x, passes = sort_batch(net, x, max_passes=prm.N)
    if not (x[:, :-1] <= x[:, 1:]).all():
        raise VerificationFailure(f"M^{p}_{k} stopped on an unsorted permutation")
    return passes


def bench_sort(
    p: int,
    k: int,
    trials: int = 1000,
    seed: int = 0,
    allow_p3: bool = False,
    chunk: int = 250,
    inputs: np.ndarray | None = None,
) -> BenchResult:
    """Average and maximal early-stopped sorting time over random permutations.

    ``inputs`` replaces the random permutations (rows of length N), mainly for
    tests.
    """
    prm = params(p, k, allow_p3)
    if trials < 1:
        raise ValueError("trials must be positive")
    if inputs is not None:
        x = np.array(inputs, dtype=np.int64, copy=True)
        x, passes = sort_batch(build_m(p, k, allow_p3), x, max_passes=prm.N)
        if not (x[:, :-1] <= x[:, 1:]).all():
            raise VerificationFailure("unsorted terminal state")
        trials = len(x)
    else:
        ids = list(range(trials))
        parts = [ids[i : i + chunk] for i in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=min(workers(), len(parts))) as pool:
            passes = np.concatenate(list(pool.map(lambda ids: _run_chunk(p, k, allow_p3, seed, ids), parts)))
    stages = passes * p
    return BenchResult(
        p=p,
        k=k,
        N=prm.N,
        trials=trials,
        seed=seed,
        avg_stages=round(float(stages.mean()), 6),
        max_stages=int(stages.max()),
        avg_passes=round(float(passes.mean()), 6),
        max_passes=int(passes.max()),
        log2N_sq=round(math.log2(prm.N) ** 2, 6),
    )


def results_csv(results: Iterable[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow(astuple(r))
    return buf.getvalue()


def merge_times(ps: Iterable[int], ks: Iterable[int], allow_p3: bool = False) -> list[dict]:
    rows = []
    for p in ps:
        for k in ks:
            if k < p:
                continue
            prm = params(p, k, allow_p3)
            lg = math.log2(prm.N)
            rows.append(
                {
                    "p": p,
                    "k": k,
                    "N": prm.N,
                    "log2N": round(lg, 6),
                    "merge_stages": prm.merge_stages,
                    "bound": round(2 * p / (p - 2) * lg + p * (p - 8) / (p - 2), 6),
                    "stages_per_log2N": round(prm.merge_stages / lg, 6),
                }
            )
    return rows


def merge_times_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=MERGE_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def emit_results(results: Sequence[BenchResult], path: str | Path, fmt: str | None = None) -> Path:
    """Write results as CSV or as an SVG chart of average stages against log2 N."""
    results = list(results)
    if not results:
        raise ValueError("no results to write")
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        path.write_text(results_csv(results))
    elif fmt == "svg":
        _plot_svg(results, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def _plot_svg(results: Sequence[BenchResult], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "pmerge"
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in sorted({r.p for r in results}):
        rows = sorted((r for r in results if r.p == p), key=lambda r: r.N)
        ax.plot([math.log2(r.N) for r in rows], [r.avg_stages for r in rows], marker="o", label=f"p={p} avg")
        ax.plot([math.log2(r.N) for r in rows], [r.max_stages for r in rows], ls=":", marker=".", label=f"p={p} max")
    xs = sorted({math.log2(r.N) for r in results})
    ax.plot(xs, [x * x for x in xs], color="k", lw=1, label="log2(N)^2")
    ax.set_xlabel("log2 N")
    ax.set_ylabel("stages until no exchange")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def result_fields() -> list[str]:
    return [f.name for f in fields(BenchResult)]
