"""Run every verification claim over a (p, k) grid and print one line per report.

    python3 scripts/verify_grid.py --p 4,5,6 --k 4-10 [--json results/verify.json]

Exits 1 if any report fails.
"""

import argparse
import json
import sys
from pathlib import Path

from pmerge.cli import _int_list
from pmerge.verify import CLAIMS, run_claims


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=_int_list, default=[4, 5, 6])
    ap.add_argument("--k", type=_int_list, default=list(range(4, 11)))
    ap.add_argument("--claim", choices=[*CLAIMS, "all"], default="all")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write all reports to this file")
    args = ap.parse_args()

    reports = []
    for p in args.p:
        for k in args.k:
            if k < p:
                continue
            for rep in run_claims(p, k, args.claim, args.trials, args.seed):
                print(rep.summary(), flush=True)
                reports.append(rep)
    if args.json:
        Path(args.json).parent.mkdir(parents=True, exist_ok=True)
        Path(args.json).write_text(json.dumps([json.loads(r.to_json()) for r in reports], indent=1) + "\n")
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} reports passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
