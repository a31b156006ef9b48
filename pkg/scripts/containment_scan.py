"""Find (p, k) where a balanced 2-flat state leaves its descriptor box.

For each point, report the first step with a violation and one counterexample:
start state, reduced state after that step and the box.

    python3 scripts/containment_scan.py --p 4-6 --k 4-16 --trials 20000
"""

import argparse

import numpy as np

from pmerge import columns as col
from pmerge.cli import _int_list
from pmerge.constructions import params


def scan(p: int, k: int, trials: int, seed: int):
    prm = params(p, k)
    rng = np.random.default_rng([seed, p, k])
    c = col.random_balanced_two_flat_states(prm, trials, rng)
    s = c[:, 0] + c[:, -1]
    d = 2 * c[:, : prm.half] - s[:, None]
    for i, lo, hi in col.iter_descriptor_boxes(prm):
        col.reduced_stage_batch(prm, col.stage_of_step(prm, i), d)
        bad = np.nonzero(~((d >= lo) & (d <= hi)).all(axis=1))[0]
        if len(bad):
            r = bad[0]
            box = ",".join(col.descriptor_str(w, k) for w in col.state_sequence(prm, i))
            return i, len(bad), c[r].tolist(), (d[r] / 2).tolist(), box
    return None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=_int_list, default=[4, 5, 6])
    ap.add_argument("--k", type=_int_list, default=list(range(4, 17)))
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for p in args.p:
        for k in args.k:
            if k < p:
                continue
            prm = params(p, k)
            hit = scan(p, k, args.trials, args.seed)
            tag = f"p={p} k={k} b={prm.b} b/2 mod p={prm.half % p} (p-2)|(k-2)={(k - 2) % (p - 2) == 0}"
            if hit is None:
                print(f"{tag}: contained")
            else:
                step, count, start, reduced, box = hit
                print(f"{tag}: step {step}, {count}/{args.trials} outside; "
                      f"e.g. start {start[:8]}{'...' if len(start) > 8 else ''} reduced {reduced} box {box}")


if __name__ == "__main__":
    main()
