"""Comparator networks: structure, stage semantics, delay and compact form.

Registers are 0-based.  A network is immutable once built and can be shared
between simulations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class NetworkError(ValueError):
    """Structural problem: bad comparator, colliding stage, size mismatch."""


@dataclass(frozen=True, order=True)
class Comparator:
    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise NetworkError(f"non-standard comparator [{self.lo}:{self.hi}]")

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        return f"[{self.lo}:{self.hi}]"


def _as_comparator(c) -> Comparator:
    if isinstance(c, Comparator):
        return c
    lo, hi = c
    return Comparator(int(lo), int(hi))


@dataclass(frozen=True)
class Stage:
    """A set of comparators on pairwise disjoint registers, sorted by ``lo``."""

    comparators: tuple[Comparator, ...] = ()

    def __post_init__(self):
        comps = tuple(sorted({_as_comparator(c) for c in self.comparators}))
        if len(comps) != len(self.comparators):
            raise NetworkError("duplicate comparator in stage")
        seen: set[int] = set()
        for c in comps:
            if c.lo in seen or c.hi in seen:
                raise NetworkError(f"comparator {c!r} collides with another one in the stage")
            seen.update((c.lo, c.hi))
        object.__setattr__(self, "comparators", comps)

    @classmethod
    def of(cls, comparators: Iterable) -> "Stage":
        """Build a stage from ``(lo, hi)`` pairs, merging exact duplicates."""
        return cls(tuple({_as_comparator(c) for c in comparators}))

    def __len__(self):
        return len(self.comparators)

    def __iter__(self):
        return iter(self.comparators)

    @cached_property
    def registers(self) -> frozenset[int]:
        return frozenset(r for c in self.comparators for r in c)

    @cached_property
    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.fromiter((c.lo for c in self.comparators), dtype=np.intp, count=len(self))
        hi = np.fromiter((c.hi for c in self.comparators), dtype=np.intp, count=len(self))
        return lo, hi

    def union(self, other: "Stage") -> "Stage":
        """Disjoint union; raises :class:`NetworkError` on register overlap."""
        shared = set(self.comparators) & set(other.comparators)
        a = self.registers - {r for c in shared for r in c}
        b = other.registers - {r for c in shared for r in c}
        if a & b:
            raise NetworkError(f"stages overlap on registers {sorted(a & b)[:8]}")
        return Stage.of(self.comparators + other.comparators)


@dataclass(frozen=True)
class Network:
    register_count: int
    stages: tuple[Stage, ...] = field(default=())

    def __post_init__(self):
        if self.register_count < 1:
            raise NetworkError("a network needs at least one register")
        stages = tuple(s if isinstance(s, Stage) else Stage.of(s) for s in self.stages)
        for t, stage in enumerate(stages, 1):
            for c in stage:
                if c.hi >= self.register_count:
                    raise NetworkError(
                        f"stage {t}: comparator {c!r} outside {self.register_count} registers"
                    )
        object.__setattr__(self, "stages", stages)

    @property
    def depth(self) -> int:
        return len(self.stages)

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.stages)

    def comparators(self) -> set[Comparator]:
        return {c for s in self.stages for c in s}

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "registers": self.register_count,
            "stages": [[[c.lo, c.hi] for c in s] for s in self.stages],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        return cls(int(data["registers"]), tuple(Stage.of(map(tuple, s)) for s in data["stages"]))

    @classmethod
    def from_json(cls, text: str) -> "Network":
        return cls.from_dict(json.loads(text))

    def to_stage_listing(self, one_based: bool = False) -> str:
        off = 1 if one_based else 0
        lines = []
        for t, stage in enumerate(self.stages, 1):
            body = " ".join(f"[{c.lo + off}:{c.hi + off}]" for c in stage)
            lines.append(f"stage {t} ({len(stage)}): {body}")
        return "\n".join(lines)

    def to_dot(self, name: str = "network") -> str:
        """Graphviz drawing: one column cluster per stage, registers as rows."""
        out = [f'graph "{name}" {{', "  rankdir=LR;", "  node [shape=point];", "  splines=false;"]
        for t, stage in enumerate(self.stages, 1):
            out.append(f"  subgraph cluster_s{t} {{")
            out.append(f'    label="S{t}"; style=dotted;')
            for r in range(self.register_count):
                out.append(f'    s{t}_r{r} [group="r{r}"];')
            for c in stage:
                out.append(f"    s{t}_r{c.lo} -- s{t}_r{c.hi};")
            out.append("  }")
        for r in range(self.register_count):
            chain = " -- ".join(f"s{t}_r{r}" for t in range(1, self.depth + 1))
            if self.depth > 1:
                out.append(f"  {chain} [style=invis, weight=10];")
        out.append("}")
        return "\n".join(out) + "\n"


def apply_stage(stage: Stage, values: Sequence) -> tuple[list, bool]:
    """Apply one stage; return the new values and whether anything was swapped."""
    out = list(values)
    n = len(out)
    exchanged = False
    for c in stage:
        if c.hi >= n:
            raise NetworkError(f"comparator {c!r} outside {n} values")
        a, b = out[c.lo], out[c.hi]
        if b < a:
            out[c.lo], out[c.hi] = b, a
            exchanged = True
    return out, exchanged


def apply_network(net: Network, values: Sequence) -> tuple[list, bool]:
    if len(values) != net.register_count:
        raise NetworkError(f"expected {net.register_count} values, got {len(values)}")
    out = list(values)
    exchanged = False
    for stage in net.stages:
        out, ex = apply_stage(stage, out)
        exchanged |= ex
    return out, exchanged


def first_last_use(net: Network) -> dict[int, tuple[int, int]]:
    """Map register -> (first, last) 1-based stage index touching it."""
    span: dict[int, tuple[int, int]] = {}
    for t, stage in enumerate(net.stages, 1):
        for r in stage.registers:
            lo, _ = span.get(r, (t, t))
            span[r] = (lo, t)
    return span


def delay(net: Network) -> int:
    return max((last - first + 1 for first, last in first_last_use(net).values()), default=0)


def compact_form(net: Network) -> Network:
    """Fold stages ``delay`` apart onto each other.

    Raises NetworkError if a folded stage is not disjoint, which means the input
    does not have the delay structure it claims.
    """
    d = delay(net)
    if d < 1:
        raise NetworkError("compact form of a network without comparators")
    folded = [Stage() for _ in range(d)]
    for t, stage in enumerate(net.stages):
        try:
            folded[t % d] = folded[t % d].union(stage)
        except NetworkError as exc:
            raise NetworkError(f"folding stage {t + 1} onto stage {t % d + 1}: {exc}") from None
    return Network(net.register_count, tuple(folded))


def restrict(net: Network, dropped: Iterable[int]) -> Network:
    """Delete registers, dropping every comparator that touches one of them."""
    dropped = set(dropped)
    keep = [r for r in range(net.register_count) if r not in dropped]
    renumber = {r: i for i, r in enumerate(keep)}
    stages = tuple(
        Stage.of(
            (renumber[c.lo], renumber[c.hi])
            for c in stage
            if c.lo not in dropped and c.hi not in dropped
        )
        for stage in net.stages
    )
    return Network(len(keep), stages)
