"""Vectorised simulation of many inputs at once.

Two layouts are supported:

* value batches: integer array of shape ``(batch, registers)``; one row per input.
* bit-sliced 0-1 batches: ``uint64`` array of shape ``(registers, words)``; bit
  ``b`` of word ``w`` in row ``r`` is the content of register ``r`` for input
  ``64 * w + b``.  A comparator becomes ``(a & b, a | b)``.

Both must agree with :func:`pmerge.network.apply_stage` on every input; the
test suite cross-checks them.
"""

from __future__ import annotations

import numpy as np

from .network import Network, Stage


def stage_values(stage: Stage, x: np.ndarray) -> np.ndarray:
    """Apply ``stage`` in place to a value batch; return per-row exchange flags."""
    lo, hi = stage.index_arrays
    a = x[:, lo]
    b = x[:, hi]
    swap = b < a
    x[:, lo] = np.minimum(a, b)
    x[:, hi] = np.maximum(a, b)
    return swap.any(axis=1)


def network_values(net: Network, x: np.ndarray) -> np.ndarray:
    exchanged = np.zeros(x.shape[0], dtype=bool)
    for stage in net.stages:
        exchanged |= stage_values(stage, x)
    return exchanged


def stage_bits(stage: Stage, x: np.ndarray) -> None:
    lo, hi = stage.index_arrays
    a = x[lo]
    b = x[hi]
    x[lo] = a & b
    x[hi] = a | b


def network_bits(net: Network, x: np.ndarray) -> None:
    for stage in net.stages:
        stage_bits(stage, x)


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Bit-slice a ``(batch, registers)`` 0-1 array into ``(registers, words)``."""
    batch, n = rows.shape
    words = -(-batch // 64)
    padded = np.zeros((words * 64, n), dtype=np.uint8)
    padded[:batch] = rows
    packed = np.packbits(padded.T, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(n, words)


def unpack_rows(x: np.ndarray, batch: int) -> np.ndarray:
    n = x.shape[0]
    bits = np.unpackbits(x.view(np.uint8).reshape(n, -1), axis=1, bitorder="little")
    return bits[:, :batch].T.copy()


def unsorted_mask_bits(x: np.ndarray) -> np.ndarray:
    """Per-word mask of inputs whose registers are not non-decreasing."""
    return np.bitwise_or.reduce(x[:-1] & ~x[1:], axis=0) if x.shape[0] > 1 else np.zeros(
        x.shape[1], dtype=np.uint64
    )


def is_sorted_rows(x: np.ndarray) -> np.ndarray:
    return (x[:, :-1] <= x[:, 1:]).all(axis=1)


# --- compiled two-sorted merge check -------------------------------------------

def flat_stages(net: Network) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Comparator endpoints of all stages, concatenated, plus stage offsets."""
    lo = np.concatenate([s.index_arrays[0] for s in net.stages] or [np.empty(0, np.intp)])
    hi = np.concatenate([s.index_arrays[1] for s in net.stages] or [np.empty(0, np.intp)])
    offsets = np.cumsum([0] + [len(s) for s in net.stages])
    return lo.astype(np.int64), hi.astype(np.int64), offsets.astype(np.int64)


try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


def _two_sorted_kernel(lo, hi, n, passes, max_report):
    """For every two-sorted input (ones_a, ones_b), run ``passes`` passes and
    record unsorted results.

    Inputs are laid out with ones_a fixed per word and ones_b along the bits,
    so every register word is a constant or a single shifted mask.
    """
    h = n // 2
    words = (h + 64) // 64
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    reg = np.empty(n, dtype=np.uint64)
    found = np.zeros((max_report, 2), dtype=np.int64)
    nfound = 0
    failures = 0
    m = lo.shape[0]
    for a in range(h + 1):
        for u in range(words):
            base = 64 * u
            for q in range(h):
                t = h - q
                reg[2 * q] = full if a >= t else np.uint64(0)
                if t <= base:
                    reg[2 * q + 1] = full
                elif t > base + 63:
                    reg[2 * q + 1] = np.uint64(0)
                else:
                    reg[2 * q + 1] = full << np.uint64(t - base)
            for _ in range(passes):
                for c in range(m):
                    x = reg[lo[c]]
                    y = reg[hi[c]]
                    reg[lo[c]] = x & y
                    reg[hi[c]] = x | y
            bad = np.uint64(0)
            for r in range(n - 1):
                bad |= reg[r] & ~reg[r + 1]
            if base + 63 > h:
                keep = h - base + 1
                bad &= (np.uint64(1) << np.uint64(keep)) - np.uint64(1)
            while bad:
                bit = 0
                while not (bad >> np.uint64(bit)) & np.uint64(1):
                    bit += 1
                bad &= ~(np.uint64(1) << np.uint64(bit))
                if nfound < max_report:
                    found[nfound, 0] = a
                    found[nfound, 1] = base + bit
                    nfound += 1
                failures += 1
    return failures, found[:nfound]


_two_sorted_compiled = njit(cache=True, nogil=True)(_two_sorted_kernel) if njit else None


def two_sorted_failures(net: Network, passes: int, max_report: int = 10) -> tuple[int, np.ndarray]:
    """Count two-sorted 0-1 inputs left unsorted after ``passes`` passes.

    Returns the failure count and up to ``max_report`` failing
    ``(ones_in_odd, ones_in_even)`` pairs.  Stages run in order within each
    pass, matching :func:`network_bits`.
    """
    lo, hi, _ = flat_stages(net)
    kernel = _two_sorted_compiled or _two_sorted_kernel
    failures, found = kernel(lo, hi, net.register_count, passes, max_report)
    return int(failures), found
