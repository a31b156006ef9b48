"""Builders for the sorter CW_k, the intermediate network
P^p_k and the p-periodic merger M^p_k.

Register numbering: P^p_k uses registers ``0 .. N_k + 1``.  M^p_k drops the two
outer ones, so register ``r`` of M (0-based) is register ``r + 1`` of P, which
is also its 1-based label in the usual drawings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil

from .network import Comparator, Network, NetworkError, Stage, compact_form, restrict


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkParams:
    p: int
    k: int
    n: int  # rows of the register matrix, 2^(k-1) - 1
    b: int  # columns, always even
    N: int  # registers of M^p_k
    D: int  # depth of P^p_k

    @property
    def half(self) -> int:
        return self.b // 2

    @property
    def shift_count(self) -> int:
        """Number of short shift stages, floor((k-2)/(p-2))."""
        return (self.k - 2) // (self.p - 2)

    @property
    def merge_passes(self) -> int:
        return self.b - 1

    @property
    def merge_stages(self) -> int:
        return self.p * (self.b - 1)

    @property
    def balanced_stages(self) -> int:
        """Stages after which a balanced 2-flat column state is flat."""
        return self.p * (self.b - 1) - (self.half - 1)

    def h(self, s: int) -> int:
        if not 1 <= s <= self.k - 1:
            raise ParameterError(f"h(s) needs 1 <= s <= {self.k - 1}, got {s}")
        return 2 ** (self.k - s - 1) - 1

    def long_levels(self, j: int) -> range:
        """Values of s handled by column pair j (1-based)."""
        q = self.p - 2
        return range(q * (j - 1) + 1, min(q * j, self.k - 1) + 1)


def params(p: int, k: int, allow_p3: bool = False) -> NetworkParams:
    lowest = 3 if allow_p3 else 4
    if p < lowest:
        raise ParameterError(f"period p={p} not supported (need p >= {lowest})")
    if k < p:
        raise ParameterError(f"need k >= p, got p={p}, k={k}")
    n = 2 ** (k - 1) - 1
    b = 2 * ceil((k - 2) / (p - 2))
    return NetworkParams(p=p, k=k, n=n, b=b, N=n * b, D=k - 1 + b // 2)


def build_cw(k: int) -> Network:
    if k < 1:
        raise ParameterError("CW_k needs k >= 1")
    stages = [Stage.of((2 * i, 2 * i + 1) for i in range(2 ** (k - 1)))]
    for j in range(1, k):
        stages.append(
            Stage.of(
                (2 * i + 1, 2 * i + 2 ** (k - j))
                for i in range(2 ** (k - 1) - 2 ** (k - j - 1))
            )
        )
    return Network(2**k, tuple(stages))


class _StageBuilder:
    """Collects comparators per stage and reports collisions with their origin."""

    def __init__(self, depth: int, registers: int):
        self.registers = registers
        self.owner: list[dict[int, tuple[Comparator, str]]] = [{} for _ in range(depth)]

    def add(self, stage: int, lo: int, hi: int, origin: str) -> None:
        if not 0 <= lo < hi < self.registers:
            raise NetworkError(f"bad comparator [{lo}:{hi}] in stage {stage} from {origin}")
        c = Comparator(lo, hi)
        slot = self.owner[stage - 1]
        for r in (lo, hi):
            prev = slot.get(r)
            if prev is not None and prev[0] != c:
                raise NetworkError(
                    f"stage {stage}: {c!r} from {origin} collides with {prev[0]!r} from {prev[1]}"
                )
        slot[lo] = slot[hi] = (c, origin)

    def network(self) -> Network:
        return Network(
            self.registers, tuple(Stage.of(c for c, _ in slot.values()) for slot in self.owner)
        )


@lru_cache(maxsize=None)
def build_p(p: int, k: int, allow_p3: bool = False) -> Network:
    prm = params(p, k, allow_p3)
    n, b, N, D = prm.n, prm.b, prm.N, prm.D
    sb = _StageBuilder(D, N + 2)

    sb.add(1, 0, 1, "boundary")
    sb.add(1, N, N + 1, "boundary")
    for i in range(1, n):
        sb.add(1, b * i, b * i + 1, f"first(i={i})")

    for j in range(1, prm.half + 1):
        for s in prm.long_levels(j):
            span = 2 ** (k - s - 1)
            for i in range(n - span + 1):
                sb.add(j + s, b * i + j, b * (i + span - 1) + (b - j + 1), f"long(j={j}, s={s}, i={i})")

    for j in range(1, prm.shift_count + 1):
        t = (p - 1) * j + 1
        if t > D:
            break
        for i in range(n):
            sb.add(t, b * i + j, b * i + j + 1, f"shift(j={j}, i={i})")
            sb.add(t, b * i + b - j, b * i + b - j + 1, f"shift(j={j}, i={i})")

    return sb.network()


@lru_cache(maxsize=None)
def build_m(p: int, k: int, allow_p3: bool = False) -> Network:
    prm = params(p, k, allow_p3)
    pnet = build_p(p, k, allow_p3)
    m = compact_form(restrict(pnet, {0, prm.N + 1}))
    if m.depth != p:
        raise NetworkError(f"M^{p}_{k} has {m.depth} stages, expected {p}")
    return m


def columns(prm: NetworkParams) -> list[list[int]]:
    """0-based registers of M^p_k in each column, top row first."""
    return [[t + i * prm.b for i in range(prm.n)] for t in range(prm.b)]
