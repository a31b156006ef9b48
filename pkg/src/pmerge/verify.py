"""Verification campaigns.

Each campaign returns a :class:`VerificationReport`.  Campaigns are
deterministic in ``(p, k, trials, seed)``; the elapsed time is kept out of the
serialised form unless asked for, so reports compare byte for byte.
"""

from __future__ import annotations

import heapq
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import batch
from . import columns as col
from .constructions import NetworkParams, build_cw, build_m, build_p, params
from .network import Comparator, Network, apply_network, delay
from .simulator import interleave

EXHAUSTIVE_LIMIT = 10**6
MAX_FAILURES = 10  # counterexamples kept per report


@dataclass
class VerificationReport:
    claim: str
    params: dict
    cases: int = 0
    mode: str = "exhaustive"
    seed: int | None = None
    failures: list[dict] = field(default_factory=list)
    failure_count: int = 0
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, **payload) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(payload)

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not timing:
            d.pop("elapsed")
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, default=_jsonable)

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({self.failure_count})"
        prm = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.claim:<22} {prm:<12} {self.mode:<10} cases={self.cases:<9} {status}"


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


class _timed:
    def __init__(self, report: VerificationReport):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed = time.perf_counter() - self.t0
        return False


# --- oracles -----------------------------------------------------------------


def oracle_merge(a: Sequence, b: Sequence) -> list:
    for name, s in (("a", a), ("b", b)):
        if any(s[i] > s[i + 1] for i in range(len(s) - 1)):
            raise ValueError(f"{name} is not sorted")
    return list(heapq.merge(a, b))


def enumerate_two_sorted_01(n: int) -> Iterator[tuple[int, ...]]:
    """All 0-1 sequences of even length ``n`` whose odd- and even-position
    subsequences are both sorted; ``(n/2 + 1)**2`` of them."""
    if n % 2:
        raise ValueError("length must be even")
    h = n // 2
    for x in range(h + 1):
        for y in range(h + 1):
            yield tuple(interleave([0] * (h - x) + [1] * x, [0] * (h - y) + [1] * y))


def two_sorted_bits(n: int, ones_a: np.ndarray, ones_b: np.ndarray) -> np.ndarray:
    """Bit-sliced two-sorted inputs, one per pair ``(ones_a[i], ones_b[i])``."""
    h = n // 2
    thresh = h - np.arange(h)
    odd = ones_a[None, :] >= thresh[:, None]
    even = ones_b[None, :] >= thresh[:, None]
    rows = np.empty((n, len(ones_a)), dtype=np.uint8)
    rows[0::2] = odd
    rows[1::2] = even
    return batch.pack_rows(rows.T)


def _failing_indices(mask: np.ndarray, limit: int) -> list[int]:
    out = []
    for w in np.nonzero(mask)[0]:
        word = int(mask[w])
        for bit in range(64):
            if word >> bit & 1:
                out.append(int(w) * 64 + bit)
                if len(out) >= limit:
                    return out
    return out


def _check_two_sorted_merges(net: Network, passes: int, report: VerificationReport) -> None:
    failures, found = batch.two_sorted_failures(net, passes, MAX_FAILURES)
    for a, b in found:
        report.fail(ones_a=int(a), ones_b=int(b))
    report.failure_count += failures - len(found)
    report.cases += (net.register_count // 2 + 1) ** 2


def check_two_sorted_numpy(
    net: Network, passes: int, report: VerificationReport, chunk: int = 1 << 16
) -> None:
    """Reference path for :func:`_check_two_sorted_merges` using numpy bit slices."""
    n = net.register_count
    h = n // 2
    total = (h + 1) ** 2
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        ones_a, ones_b = np.divmod(idx, h + 1)
        x = two_sorted_bits(n, ones_a, ones_b)
        for _ in range(passes):
            batch.network_bits(net, x)
        bad = batch.unsorted_mask_bits(x)
        bad_idx = [i for i in _failing_indices(bad, MAX_FAILURES) if i < len(idx)]
        if bad_idx:
            count = sum(bin(int(w)).count("1") for w in bad)
            for i in bad_idx:
                report.fail(ones_a=int(ones_a[i]), ones_b=int(ones_b[i]))
            report.failure_count += count - len(bad_idx)
        report.cases += len(idx)


def _per_pass_trace(net: Network, values: list, passes: int) -> list[list]:
    out = []
    for _ in range(passes):
        values, _ = apply_network(net, values)
        out.append(values)
    return out


# --- campaigns ---------------------------------------------------------------


def verify_merger(p: int, k: int, trials: int = 200, seed: int = 0) -> VerificationReport:
    """Every two-sorted 0-1 input is sorted by b_k - 1 passes of M^p_k, plus an
    integer spot check against the reference merge."""
    prm = params(p, k)
    net = build_m(p, k)
    rep = VerificationReport("merger", {"p": p, "k": k}, seed=seed)
    with _timed(rep):
        _check_two_sorted_merges(net, prm.merge_passes, rep)
        for f in rep.failures:
            h = prm.N // 2
            v = interleave([0] * (h - f["ones_a"]) + [1] * f["ones_a"], [0] * (h - f["ones_b"]) + [1] * f["ones_b"])
            f["per_pass"] = ["".join(map(str, s)) for s in _per_pass_trace(net, v, prm.merge_passes)]
        rep.details["zero_one_cases"] = rep.cases
        rep.details["expected_zero_one_cases"] = (prm.N // 2 + 1) ** 2
        if rep.cases != rep.details["expected_zero_one_cases"]:
            rep.fail(reason="zero-one enumeration incomplete")
        rep.details["passes"] = prm.merge_passes
        rep.details["stages"] = prm.merge_stages

        rng = np.random.default_rng([seed, p, k])
        h = prm.N // 2
        a = np.sort(rng.integers(0, 4 * prm.N, (trials, h)), axis=1)
        b = np.sort(rng.integers(0, 4 * prm.N, (trials, h)), axis=1)
        x = np.empty((trials, prm.N), dtype=np.int64)
        x[:, 0::2], x[:, 1::2] = a, b
        for _ in range(prm.merge_passes):
            batch.network_values(net, x)
        expect = np.sort(np.concatenate([a, b], axis=1), axis=1)
        for t in np.nonzero((x != expect).any(axis=1))[0]:
            rep.fail(integer_trial=int(t))
        rep.details["integer_trials"] = trials
        rep.cases += trials
    return rep


def verify_cw(k: int, samples: int = 10**5, seed: int = 0) -> VerificationReport:
    """CW_k merges two-sorted inputs in one pass and sorts any input in k passes."""
    net = build_cw(k)
    n = net.register_count
    rep = VerificationReport("cw", {"k": k}, seed=seed)
    with _timed(rep):
        merge_rep = VerificationReport("cw-merge", {"k": k})
        _check_two_sorted_merges(net, 1, merge_rep)
        rep.cases += merge_rep.cases
        for f in merge_rep.failures:
            rep.fail(part="merge", **f)
        rep.failure_count += merge_rep.failure_count - len(merge_rep.failures)
        rep.details["merge_cases"] = merge_rep.cases

        if n <= 16:
            idx = np.arange(2**n, dtype=np.int64)
            sort_mode = "exhaustive"
        else:
            rng = np.random.default_rng([seed, k])
            idx = None
            sort_mode = "sampled"
        if idx is not None:
            rows = ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)
        else:
            rows = rng.integers(0, 2, (samples, n), dtype=np.uint8)
        x = batch.pack_rows(rows)
        for _ in range(k):
            batch.network_bits(net, x)
        bad = _failing_indices(batch.unsorted_mask_bits(x), MAX_FAILURES)
        for i in bad:
            if i < len(rows):
                rep.fail(part="sort", input="".join(map(str, rows[i])))
        rep.cases += len(rows)
        rep.details["sort_cases"] = len(rows)
        rep.details["sort_mode"] = sort_mode
        rep.mode = "exhaustive" if sort_mode == "exhaustive" else "mixed"
    return rep


def sorted_column_registers(prm: NetworkParams, counts: np.ndarray) -> np.ndarray:
    """0-1 register contents (rows) whose column ``t`` holds ``counts[:, t]`` ones
    at the bottom."""
    rows = np.arange(prm.n)
    grid = rows[None, :, None] >= (prm.n - counts)[:, None, :]
    return grid.reshape(counts.shape[0], prm.N).astype(np.uint8)


def column_counts(prm: NetworkParams, regs: np.ndarray) -> np.ndarray:
    return regs.reshape(regs.shape[0], prm.n, prm.b).sum(axis=1, dtype=np.int64)


def verify_column_equivalence(p: int, k: int, trials: int = 10**4, seed: int = 0) -> VerificationReport:
    """Register simulation and column-count maps agree stage by stage."""
    prm = params(p, k)
    net = build_m(p, k)
    rep = VerificationReport("columns", {"p": p, "k": k}, seed=seed)
    with _timed(rep):
        space = (prm.n + 1) ** prm.b
        if space <= trials:
            grids = np.meshgrid(*[np.arange(prm.n + 1)] * prm.b, indexing="ij")
            counts = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
        else:
            rep.mode = "sampled"
            counts = np.random.default_rng([seed, p, k]).integers(0, prm.n + 1, (trials, prm.b))
        regs = sorted_column_registers(prm, counts)
        c = counts.copy()
        for step in range(1, prm.merge_stages + 1):
            x = col.stage_of_step(prm, step)
            batch.stage_values(net.stages[x - 1], regs)
            col.q_stage_batch(prm, x, c)
            got = column_counts(prm, regs)
            bad = np.nonzero((got != c).any(axis=1))[0]
            for r in bad[:MAX_FAILURES]:
                cols = np.nonzero(got[r] != c[r])[0] + 1
                rep.fail(step=step, stage=x, start=counts[r].tolist(), columns=cols.tolist())
            rep.failure_count += max(0, len(bad) - MAX_FAILURES)
            if len(bad):
                break
        rep.cases = len(counts)
        rep.details["stages_compared"] = prm.merge_stages
    return rep


def _half_steps(lo: int, hi: int) -> np.ndarray:
    return np.arange(lo, hi + 1)


def check_interval_inclusions(k: int) -> list[dict]:
    """Dense half-step check of the interval mapping facts; returns failures.

    All arithmetic is on doubled values.
    """
    fails: list[dict] = []
    iv = lambda w: col.interval_twice(w, k)  # noqa: E731

    def inside(vals, w):
        lo, hi = iv(w)
        return bool(((vals >= lo) & (vals <= hi)).all())

    def dec(i, v):
        return np.minimum(v, -v + 2 * (2**i - 1))

    def pts(w):
        return _half_steps(*iv(w))

    for i in range(1, k - 1):
        if not inside(dec(i, pts(i + 1)), i):
            fails.append({"fact": "Dec", "i": i, "from": i + 1})
        for w in (0, col.NEG, col.PM):
            if not inside(dec(i, pts(w)), w):
                fails.append({"fact": "Dec", "i": i, "from": w})
    cyc = lambda v: np.maximum(v, -v - 2)  # noqa: E731
    if not inside(cyc(pts(col.NEG)), k - 1):
        fails.append({"fact": "Cyc", "from": col.NEG})
    for w in (0, k - 1):
        if not inside(cyc(pts(w)), w):
            fails.append({"fact": "Cyc", "from": w})
    mn = lambda v: np.minimum(v, -v)  # noqa: E731
    if not inside(mn(pts(col.PM)), col.NEG):
        fails.append({"fact": "Min", "from": col.PM})
    if not inside(mn(pts(1)), 0):
        fails.append({"fact": "Min", "from": 1})

    def minmax(w1, w2, t1, t2):
        a, b = np.meshgrid(pts(w1), pts(w2), indexing="ij")
        return inside(np.minimum(a, b), t1) and inside(np.maximum(a, b), t2)

    if not minmax(col.PM, col.NEG, col.NEG, col.PM):
        fails.append({"fact": "MinMax", "from": [col.PM, col.NEG]})
    for i in range(1, k):
        for w in (0, col.NEG):
            if not minmax(i, w, w, i):
                fails.append({"fact": "MinMax", "from": [i, w]})
    return fails


def bounds_batch(prm: NetworkParams, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised lower/upper bounds for unbalanced 2-flat rows."""
    b, m = prm.b, prm.half
    odd, even = c[:, 0::2], c[:, 1::2]

    def first_step(steps: np.ndarray) -> np.ndarray:
        if steps.shape[1] == 0:
            return np.full(steps.shape[0], m)
        return np.where(steps.any(axis=1), steps.argmax(axis=1) + 1, m)

    i = first_step(np.diff(odd, axis=1) > 0)
    # c_{b-2j} < c_{b-2j+2}: scan the even track from its far end
    j = first_step(np.diff(even[:, ::-1], axis=1) < 0)
    l = np.arange(1, b + 1)[None, :]
    is_odd = (l % 2 == 1)
    first, second = c[:, [0]], c[:, [1]]
    last_odd, last = c[:, [b - 2]], c[:, [b - 1]]
    low_a = np.where(is_odd, np.where(l <= 2 * j[:, None] - 1, first, last_odd), c)
    up_a = np.where(is_odd, last_odd, last)
    low_b = np.where(is_odd, first, second)
    up_b = np.where(is_odd, c, np.where(l <= b - 2 * i[:, None], second, last))
    lt = (i < j)[:, None]
    return np.where(lt, low_a, low_b), np.where(lt, up_a, up_b)


def verify_column_theorems(
    p: int, k: int, trials: int = 10**5, seed: int = 0, limit: int = EXHAUSTIVE_LIMIT
) -> VerificationReport:
    """Interval facts, trace containment, terminal states and bounds sandwich."""
    prm = params(p, k)
    rep = VerificationReport("theorems", {"p": p, "k": k}, seed=seed)
    with _timed(rep):
        for f in check_interval_inclusions(k):
            rep.fail(part="intervals", **f)

        rng = np.random.default_rng([seed, p, k])
        exhaustive = col.two_flat_count(prm) <= limit
        rep.mode = "exhaustive" if exhaustive else "sampled"

        bal = col.balanced_two_flat_states(prm) if exhaustive else col.random_balanced_two_flat_states(prm, trials, rng)
        _trace_containment(prm, bal, rep)

        states = col.two_flat_states(prm) if exhaustive else col.random_two_flat_states(prm, trials, rng)
        _general_flatness(prm, states, rep)
        rep.cases = len(bal) + len(states)
        rep.details.update(balanced_cases=len(bal), two_flat_cases=len(states))
    return rep


def _trace_containment(prm: NetworkParams, c: np.ndarray, rep: VerificationReport) -> None:
    s = c[:, 0] + c[:, -1]
    d = 2 * c[:, : prm.half] - s[:, None]
    first_bad: dict[int, int] = {}
    for i, lo, hi in col.iter_descriptor_boxes(prm):
        col.reduced_stage_batch(prm, col.stage_of_step(prm, i), d)
        bad = np.nonzero(~((d >= lo) & (d <= hi)).all(axis=1))[0]
        if len(bad):
            first_bad[i] = len(bad)
            for r in bad[:2]:
                rep.fail(part="containment", step=i, state=c[r].tolist(),
                         reduced_twice=d[r].tolist(),
                         box=[col.descriptor_str(w, prm.k) for w in col.state_sequence(prm, i)])
            rep.failure_count += len(bad) - min(2, len(bad))
    rep.details["containment_violations_by_step"] = {str(i): n for i, n in first_bad.items()}
    # final reduced state is 0 (even height) or -1/2 (odd height)
    term_bad = np.nonzero(~(d == -(s % 2)[:, None]).all(axis=1))[0]
    for r in term_bad[:2]:
        rep.fail(part="balanced-terminal", state=c[r].tolist(), reduced_twice=d[r].tolist())
    rep.failure_count += max(0, len(term_bad) - 2)
    rep.details["balanced_terminal_failures"] = int(len(term_bad))
    rep.details["balanced_terminal_step"] = prm.balanced_stages


def _general_flatness(prm: NetworkParams, c: np.ndarray, rep: VerificationReport) -> None:
    unbalanced = ~col.balanced_rows(c)
    lower, upper = bounds_batch(prm, c[unbalanced])
    ok = (
        col.balanced_rows(lower)
        & col.balanced_rows(upper)
        & (lower[:, 0] + lower[:, -1] + 1 == upper[:, 0] + upper[:, -1])
        & (lower <= c[unbalanced]).all(axis=1)
        & (c[unbalanced] <= upper).all(axis=1)
    )
    for r in np.nonzero(~ok)[0][:2]:
        rep.fail(part="bounds", state=c[unbalanced][r].tolist())
    rep.failure_count += max(0, int((~ok).sum()) - 2)

    cur = c.copy()
    sandwich_bad = 0
    for i in range(1, prm.merge_stages + 1):
        x = col.stage_of_step(prm, i)
        for arr in (cur, lower, upper):
            col.q_stage_batch(prm, x, arr)
        mid = cur[unbalanced]
        sandwich_bad += int((~((lower <= mid) & (mid <= upper)).all(axis=1)).sum())
    if sandwich_bad:
        rep.fail(part="sandwich", count=sandwich_bad)
        rep.failure_count += sandwich_bad - 1
    flat = col.flat_rows(cur)
    for r in np.nonzero(~flat)[0][:2]:
        rep.fail(part="flatness", state=c[r].tolist(), final=cur[r].tolist())
    rep.failure_count += max(0, int((~flat).sum()) - 2)
    rep.details["flatness_step"] = prm.merge_stages
    rep.details["unbalanced_cases"] = int(unbalanced.sum())


def s_abh(a: Sequence[int], b: Sequence[int], h: int) -> set[Comparator]:
    """Comparators [a_i : b_(i+h)] between interleaved register lists."""
    return {Comparator(a[i], b[i + h]) for i in range(len(a) - h)}


def expected_p_stages(prm: NetworkParams) -> dict[int, set[Comparator]]:
    """Stages of P^p_k (registers 1..N) described column by column."""
    n, b, p, D = prm.n, prm.b, prm.p, prm.D
    column = lambda t: [t + i * b for i in range(n)]  # noqa: E731
    L = lambda j: column(j)  # noqa: E731
    R = lambda j: column(b - j + 1)  # noqa: E731
    st: dict[int, set[Comparator]] = {t: set() for t in range(1, D + 1)}
    st[1] |= s_abh(R(1)[:-1], L(1)[1:], 0)
    for j in range(1, prm.half + 1):
        for s in prm.long_levels(j):
            st[j + s] |= s_abh(L(j), R(j), prm.h(s))
    for j in range(1, prm.half):
        t = (p - 1) * j + 1
        if t <= D:
            st[t] |= s_abh(L(j), L(j + 1), 0) | s_abh(R(j + 1), R(j), 0)
    st[D] |= s_abh(L(prm.half), R(prm.half), 0)
    return st


def verify_structure(p: int, k: int) -> VerificationReport:
    prm = params(p, k)
    rep = VerificationReport("structure", {"p": p, "k": k})
    with _timed(rep):
        pnet = build_p(p, k)
        m = build_m(p, k)
        d = delay(pnet)
        rep.details["delay"] = d
        if d != p:
            rep.fail(check="delay", delay=d)
        if pnet.depth != prm.D:
            rep.fail(check="depth", depth=pnet.depth)

        inner = [set(c for c in s if c.lo >= 1 and c.hi <= prm.N) for s in pnet.stages]
        expected = expected_p_stages(prm)
        for t, stage in enumerate(inner, 1):
            if stage != expected[t]:
                rep.fail(check="stage-columns", stage=t,
                         missing=len(expected[t] - stage), extra=len(stage - expected[t]))
        # column pair j is only touched inside its stage window
        colof = lambda r: (r - 1) % prm.b + 1  # noqa: E731
        for t, stage in enumerate(inner, 1):
            for c in stage:
                for r in c:
                    j = min(colof(r), prm.b - colof(r) + 1)
                    lo, hi = (p - 1) * (j - 1) + 1, min((p - 1) * j + 1, prm.D)
                    if not lo <= t <= hi:
                        rep.fail(check="column-window", stage=t, column_pair=j)

        comps = m.comparators()
        missing = [i for i in range(prm.N - 1) if Comparator(i, i + 1) not in comps]
        if missing:
            rep.fail(check="neighbours", missing=missing[:10])
        if m.depth != p or m.register_count != prm.N:
            rep.fail(check="M-shape", depth=m.depth, registers=m.register_count)

        time_ = prm.merge_stages
        slope, offset = 2 * p / (p - 2), p * (p - 8) / (p - 2)
        by_k = slope * k + offset
        by_n = slope * math.log2(prm.N) + offset
        rep.details.update(running_time=time_, bound_k=by_k, bound_logN=by_n)
        if not time_ <= by_k + 1e-9:
            rep.fail(check="time-bound-k", time=time_, bound=by_k)
        if not time_ <= by_n + 1e-9:
            rep.fail(check="time-bound-logN", time=time_, bound=by_n)
        if p == 4:
            ok = time_ <= 4 * k - 8 <= 4 * math.log2(prm.N)
            rep.details["p4_bound"] = [time_, 4 * k - 8, 4 * math.log2(prm.N)]
            if not ok:
                rep.fail(check="p4-bound")
        rep.cases = pnet.size + m.size
    return rep


CLAIMS: dict[str, Callable[..., VerificationReport]] = {
    "merger": lambda p, k, trials, seed: verify_merger(p, k, seed=seed),
    "cw": lambda p, k, trials, seed: verify_cw(k, seed=seed),
    "columns": lambda p, k, trials, seed: verify_column_equivalence(p, k, trials or 10**4, seed),
    "theorems": lambda p, k, trials, seed: verify_column_theorems(p, k, trials or 10**5, seed),
    "structure": lambda p, k, trials, seed: verify_structure(p, k),
}


def run_claims(p: int, k: int, claim: str = "all", trials: int | None = None, seed: int = 0) -> list[VerificationReport]:
    names = list(CLAIMS) if claim == "all" else [claim]
    return [CLAIMS[name](p, k, trials, seed) for name in names]
