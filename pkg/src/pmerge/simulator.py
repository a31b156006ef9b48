"""Periodic execution of a network: passes, early stopping, merging and sorting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import batch
from .constructions import build_m, params
from .network import Network, NetworkError, apply_stage


class VerificationFailure(AssertionError):
    """The network did not do what it is supposed to do."""


@dataclass
class RunTrace:
    final_values: list
    stages_executed: int = 0
    passes_executed: int = 0
    stopped_early: bool = False
    snapshots: list[list] = field(default_factory=list)


def run_periodic(
    net: Network,
    values: Sequence,
    max_passes: int,
    early_stop: bool = False,
    record: bool = False,
) -> RunTrace:
    """Apply the stages of ``net`` cyclically, at most ``max_passes`` times.

    With ``early_stop`` the run halts after the first full pass without any
    exchange; the stages of that idle pass are counted.
    """
    if len(values) != net.register_count:
        raise NetworkError(f"expected {net.register_count} values, got {len(values)}")
    trace = RunTrace(list(values))
    cur = list(values)
    for _ in range(max_passes):
        moved = False
        for stage in net.stages:
            cur, ex = apply_stage(stage, cur)
            moved |= ex
            trace.stages_executed += 1
            if record:
                trace.snapshots.append(list(cur))
        trace.passes_executed += 1
        if early_stop and not moved:
            trace.stopped_early = True
            break
    trace.final_values = cur
    return trace


def interleave(a: Sequence, b: Sequence) -> list:
    """Place ``a`` in odd registers (1-based) and ``b`` in even ones."""
    out = []
    for x, y in zip(a, b):
        out += [x, y]
    return out


def _check_sorted(seq: Sequence, name: str) -> None:
    if any(seq[i] > seq[i + 1] for i in range(len(seq) - 1)):
        raise ValueError(f"{name} is not sorted")


def merge(p: int, k: int, a: Sequence, b: Sequence, allow_p3: bool = False) -> list:
    prm = params(p, k, allow_p3)
    half = prm.N // 2
    if len(a) != half or len(b) != half:
        raise ValueError(f"M^{p}_{k} merges two sequences of length {half}")
    _check_sorted(a, "a")
    _check_sorted(b, "b")
    trace = run_periodic(build_m(p, k, allow_p3), interleave(a, b), prm.merge_passes)
    out = trace.final_values
    if out != sorted(out):
        raise VerificationFailure(f"M^{p}_{k} left its output unsorted after {prm.merge_passes} passes")
    return out


def sort_until_done(p: int, k: int, values: Sequence, allow_p3: bool = False) -> RunTrace:
    prm = params(p, k, allow_p3)
    if len(values) != prm.N:
        raise ValueError(f"M^{p}_{k} has {prm.N} registers, got {len(values)} values")
    trace = run_periodic(build_m(p, k, allow_p3), values, max_passes=prm.N, early_stop=True)
    if not trace.stopped_early or trace.final_values != sorted(trace.final_values):
        raise VerificationFailure(f"M^{p}_{k} did not sort within {prm.N} passes")
    return trace


def sort_batch(net: Network, x: np.ndarray, max_passes: int) -> tuple[np.ndarray, np.ndarray]:
    """Early-stopped periodic sorting of every row of ``x`` (modified in place).

    Returns the per-row number of passes, counting the final idle pass.  A row
    that stops changing is sorted-or-stuck and later passes leave it alone, so
    running all rows together matches running each one separately.
    """
    rows = x.shape[0]
    passes = np.zeros(rows, dtype=np.int64)
    active = np.ones(rows, dtype=bool)
    for _ in range(max_passes):
        if not active.any():
            break
        moved = batch.network_values(net, x)
        passes[active] += 1
        active &= moved
    if active.any():
        raise VerificationFailure(f"{int(active.sum())} rows still changing after {max_passes} passes")
    return x, passes
