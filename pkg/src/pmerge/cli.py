"""Command line entry point: ``pmerge <subcommand> ...``.

Exit codes: 0 success, 1 a checked claim failed, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import columns as col
from .constructions import ParameterError, build_cw, build_m, build_p, params
from .network import NetworkError
from .simulator import VerificationFailure, merge, sort_until_done
from .verify import CLAIMS, run_claims


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _read_ints(path: str) -> list[int]:
    return [int(line) for line in Path(path).read_text().split()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmerge", description="p-periodic merging networks")
    sub = ap.add_subparsers(dest="command", required=True)

    def pk(p, default_p=None):
        p.add_argument("--p", type=int, default=default_p, required=default_p is None)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--allow-p3", action="store_true", help="accept period 3")

    b = sub.add_parser("build", help="construct a network")
    pk(b, default_p=4)
    b.add_argument("--target", choices=["cw", "p", "m"], default="m")
    b.add_argument("--format", choices=["json", "dot", "stages"], default="json")
    b.add_argument("--one-based", action="store_true", help="1-based labels in the stage listing")

    m = sub.add_parser("merge", help="merge two sorted integer files on M^p_k")
    pk(m)
    m.add_argument("--a", required=True, help="file, one integer per line")
    m.add_argument("--b", required=True)

    s = sub.add_parser("sort", help="sort with early stopping on M^p_k")
    pk(s)
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="file, one integer per line")
    src.add_argument("--random", type=int, metavar="SEED", help="random permutation of 1..N")
    s.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="check the merging and sorting claims")
    pk(v, default_p=4)
    v.add_argument("--claim", choices=[*CLAIMS, "all"], default="all")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.add_argument("--timing", action="store_true", help="include elapsed seconds in JSON")

    a = sub.add_parser("abstract", help="trace the column-count model")
    pk(a)
    a.add_argument("--state", help="comma separated column counts (default: random 2-flat)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--steps", type=int, help="default: p(b-1)")
    a.add_argument("--trace", action="store_true", help="print every step, not just the end")

    be = sub.add_parser("bench", help="average early-stopped sorting times")
    be.add_argument("--p", type=_int_list, default=[4])
    be.add_argument("--k", type=_int_list, default=[9])
    be.add_argument("--trials", type=int, default=1000)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--out", help="CSV output path (stdout if omitted)")
    be.add_argument("--svg")
    be.add_argument("--merging", action="store_true", help="merge-time table instead of sorting")
    be.add_argument("--allow-p3", action="store_true")
    return ap


def cmd_build(args) -> int:
    if args.target == "cw":
        net = build_cw(args.k)
    else:
        params(args.p, args.k, args.allow_p3)
        net = (build_p if args.target == "p" else build_m)(args.p, args.k, args.allow_p3)
    if args.format == "json":
        print(net.to_json())
    elif args.format == "dot":
        sys.stdout.write(net.to_dot(f"{args.target}_{args.p}_{args.k}"))
    else:
        print(f"# {args.target} p={args.p} k={args.k} registers={net.register_count} stages={net.depth}")
        print(net.to_stage_listing(args.one_based))
    return 0


def cmd_merge(args) -> int:
    out = merge(args.p, args.k, _read_ints(args.a), _read_ints(args.b), args.allow_p3)
    print("\n".join(map(str, out)))
    return 0


def cmd_sort(args) -> int:
    prm = params(args.p, args.k, args.allow_p3)
    if args.input:
        values = _read_ints(args.input)
    else:
        values = bench_mod.permutation(prm.N, args.random, 0).tolist()
    trace = sort_until_done(args.p, args.k, values, args.allow_p3)
    if args.json:
        print(json.dumps({"stages": trace.stages_executed, "passes": trace.passes_executed,
                          "values": trace.final_values}))
    else:
        print(f"# stages={trace.stages_executed} passes={trace.passes_executed}")
        print("\n".join(map(str, trace.final_values)))
    return 0


def cmd_verify(args) -> int:
    params(args.p, args.k)
    reports = run_claims(args.p, args.k, args.claim, args.trials, args.seed)
    if args.json:
        print(json.dumps([json.loads(r.to_json(args.timing)) for r in reports], sort_keys=True))
    else:
        for r in reports:
            print(r.summary())
            for f in r.failures[:3]:
                print("   ", json.dumps(f, default=str)[:300])
    return 0 if all(r.passed for r in reports) else 1


def _fmt_twice(v: int) -> str:
    return str(v // 2) if v % 2 == 0 else f"{v}/2"


def cmd_abstract(args) -> int:
    prm = params(args.p, args.k, args.allow_p3)
    if args.state:
        counts = tuple(int(x) for x in args.state.split(","))
    else:
        rng = np.random.default_rng(args.seed)
        counts = tuple(col.random_two_flat_states(prm, 1, rng)[0].tolist())
    state = col.ColumnState(counts, prm)
    steps = args.steps if args.steps is not None else prm.merge_stages
    balanced = col.is_balanced(state)
    print(f"# p={prm.p} k={prm.k} b={prm.b} n={prm.n} balanced={balanced} "
          f"2-flat={col.is_2flat(state)} flat-after={prm.merge_stages} balanced-flat-after={prm.balanced_stages}")
    trace = col.run_q(state, steps)
    for i, c in enumerate(trace):
        if not args.trace and i not in (0, steps):
            continue
        line = f"{i:4d} x={col.stage_of_step(prm, i) if i else '-'} {','.join(map(str, c.counts))}"
        if balanced:
            red = col.reduce(c)
            line += " | " + ",".join(_fmt_twice(v) for v in red.twice)
            if 1 <= i <= prm.balanced_stages:
                box = col.state_sequence(prm, i)
                inside = col.contains(box, red, prm.k)
                line += " | X=" + ",".join(col.descriptor_str(w, prm.k) for w in box)
                line += "" if inside else "  (outside)"
        print(line)
    print(f"final flat={col.is_flat(trace[-1])}")
    return 0


def cmd_bench(args) -> int:
    if args.merging:
        text = bench_mod.merge_times_csv(bench_mod.merge_times(args.p, args.k, args.allow_p3))
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    for p in args.p:
        for k in args.k:
            params(p, k, args.allow_p3)
    results = [
        bench_mod.bench_sort(p, k, args.trials, args.seed, args.allow_p3)
        for p in args.p
        for k in args.k
    ]
    if args.out:
        bench_mod.emit_results(results, args.out, "csv")
    else:
        sys.stdout.write(bench_mod.results_csv(results))
    if args.svg:
        bench_mod.emit_results(results, args.svg, "svg")
    return 0


COMMANDS = {
    "build": cmd_build,
    "merge": cmd_merge,
    "sort": cmd_sort,
    "verify": cmd_verify,
    "abstract": cmd_abstract,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, NetworkError, col.StateError, ValueError, OSError) as exc:
        print(f"pmerge: error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"pmerge: verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
