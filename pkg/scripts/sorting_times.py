"""Average and maximal early-stopped sorting times of random permutations.

    python3 scripts/sorting_times.py --p 4,5 --k 9-12 --trials 1000 --out results/sorting
"""

import argparse
from pathlib import Path

from pmerge import bench
from pmerge.cli import _int_list


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=_int_list, default=[4, 5])
    ap.add_argument("--k", type=_int_list, default=[9, 10, 11, 12])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--allow-p3", action="store_true")
    ap.add_argument("--out", default="results/sorting", help="path prefix for .csv and .svg")
    args = ap.parse_args()

    results = []
    for p in args.p:
        for k in args.k:
            r = bench.bench_sort(p, k, args.trials, args.seed, args.allow_p3)
            print(f"p={p} k={k} N={r.N}: avg {r.avg_stages} max {r.max_stages} stages, "
                  f"log2^2 N = {r.log2N_sq}, ratio {r.avg_stages / r.log2N_sq:.3f}", flush=True)
            results.append(r)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    bench.emit_results(results, out.with_suffix(".csv"))
    bench.emit_results(results, out.with_suffix(".svg"))
    print(f"wrote {out.with_suffix('.csv')} and {out.with_suffix('.svg')}")


if __name__ == "__main__":
    main()
