"""Merging time p(b-1) of M^p_k next to log2 N and the closed-form bound.

    python3 scripts/merge_times.py --p 4-8 --k 4-20
"""

import argparse
import sys

from pmerge import bench
from pmerge.cli import _int_list


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=_int_list, default=[4, 5, 6, 7, 8])
    ap.add_argument("--k", type=_int_list, default=list(range(4, 21)))
    args = ap.parse_args()
    sys.stdout.write(bench.merge_times_csv(bench.merge_times(args.p, args.k)))


if __name__ == "__main__":
    main()
