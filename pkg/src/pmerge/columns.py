"""Column-count model of M^p_k.

Registers of M^p_k form an ``n x b`` matrix (column ``t`` holds registers
``t, t + b, t + 2b, ...`` in 1-based numbering).  While every column is sorted
a 0-1 state is described by the number of ones per column, and each stage of
the network acts on those counts through a handful of min/max maps.

Positions are 1-based in the public functions (``j``, ``t``, ``x``), to keep
the formulas recognisable; storage is plain 0-based tuples or numpy arrays.

Reduced states are stored doubled (``2 * value``) so all arithmetic stays in
the integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .constructions import NetworkParams, ParameterError


class StateError(ValueError):
    pass


# --- column states -----------------------------------------------------------


@dataclass(frozen=True)
class ColumnState:
    counts: tuple[int, ...]
    prm: NetworkParams

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != self.prm.b:
            raise StateError(f"column state needs {self.prm.b} entries, got {len(counts)}")
        if any(not 0 <= c <= self.prm.n for c in counts):
            raise StateError(f"counts must lie in [0, {self.prm.n}]: {counts}")
        object.__setattr__(self, "counts", counts)

    def __getitem__(self, t: int) -> int:
        """1-based access."""
        return self.counts[t - 1]

    def replace(self, updates: dict[int, int]) -> "ColumnState":
        c = list(self.counts)
        for t, v in updates.items():
            c[t - 1] = v
        return ColumnState(tuple(c), self.prm)


def cyc(c: ColumnState) -> ColumnState:
    b = c.prm.b
    return c.replace({1: max(c[1], c[b] - 1), b: min(c[1] + 1, c[b])})


def dec(c: ColumnState, j: int, s: int) -> ColumnState:
    prm = c.prm
    if not 1 <= j <= prm.half:
        raise StateError(f"dec: j={j} outside 1..{prm.half}")
    h = prm.h(s)
    r = prm.b - j + 1
    return c.replace({j: min(c[j], c[r] + h), r: max(c[j] - h, c[r])})


def mov(c: ColumnState, j: int) -> ColumnState:
    b = c.prm.b
    if not 1 <= j <= c.prm.half:
        raise StateError(f"mov: j={j} outside 1..{c.prm.half}")
    upd = {j: min(c[j], c[j + 1]), j + 1: max(c[j], c[j + 1])}
    upd.update({b - j: min(c[b - j], c[b - j + 1]), b - j + 1: max(c[b - j], c[b - j + 1])})
    return c.replace(upd)


def q_components(prm: NetworkParams, x: int) -> list[tuple]:
    """The maps making up stage ``x`` of the column model.

    Items are ``("cyc",)``, ``("mov", j)`` or ``("dec", j, s)``.  Their argument
    sets are pairwise disjoint, which is checked here.
    """
    p, k = prm.p, prm.k
    if not 1 <= x <= p:
        raise ParameterError(f"stage x={x} outside 1..{p}")
    comps: list[tuple] = []
    if x == 1:
        comps.append(("cyc",))
    for j in range(1, prm.shift_count + 1):
        if (x + j) % p == 1 % p:
            comps.append(("mov", j))
    for j in range(1, prm.half + 1):
        if (x + j) % p in (1, 2):
            continue
        s = (p - 2) * (j - 1) - 1 + (x + j - 1) % p
        if 1 <= s <= k - 1:
            comps.append(("dec", j, s))
    used: set[int] = set()
    for comp in comps:
        a = component_args(prm, comp)
        if a & used:
            raise ParameterError(f"stage {x}: {comp} overlaps other maps on {sorted(a & used)}")
        used |= a
    return comps


def component_args(prm: NetworkParams, comp: tuple) -> set[int]:
    b = prm.b
    if comp[0] == "cyc":
        return {1, b}
    j = comp[1]
    if comp[0] == "dec":
        return {j, b - j + 1}
    return {j, j + 1, b - j, b - j + 1}


def apply_component(c: ColumnState, comp: tuple) -> ColumnState:
    if comp[0] == "cyc":
        return cyc(c)
    if comp[0] == "mov":
        return mov(c, comp[1])
    return dec(c, comp[1], comp[2])


def q_stage(x: int, c: ColumnState) -> ColumnState:
    for comp in q_components(c.prm, x):
        c = apply_component(c, comp)
    return c


def stage_of_step(prm: NetworkParams, i: int) -> int:
    """Which of the p stage maps runs as step ``i`` (1-based)."""
    return (i - 1) % prm.p + 1


def run_q(c: ColumnState, steps: int) -> list[ColumnState]:
    """States after steps 0..``steps``."""
    out = [c]
    for i in range(1, steps + 1):
        c = q_stage(stage_of_step(c.prm, i), c)
        out.append(c)
    return out


# --- predicates --------------------------------------------------------------


def is_flat(c: Sequence) -> bool:
    c = tuple(c.counts if isinstance(c, ColumnState) else c)
    return all(c[i] <= c[i + 1] for i in range(len(c) - 1)) and c[-1] <= c[0] + 1


def is_2flat(c: Sequence) -> bool:
    c = tuple(c.counts if isinstance(c, ColumnState) else c)
    return is_flat(c[0::2]) and is_flat(c[1::2])


def is_balanced(c: Sequence) -> bool:
    c = tuple(c.counts if isinstance(c, ColumnState) else c)
    s = c[0] + c[-1]
    return all(c[i] + c[-1 - i] == s for i in range(len(c) // 2))


def height(c: Sequence) -> int:
    cc = tuple(c.counts if isinstance(c, ColumnState) else c)
    if not is_balanced(cc):
        raise StateError(f"height of an unbalanced state {cc}")
    return cc[0] + cc[-1]


# --- reduced states ----------------------------------------------------------

Number = Union[int, Fraction]


@dataclass(frozen=True)
class ReducedState:
    """Half of a balanced state, recentred by half its height.

    ``twice`` holds the doubled values; ``values`` gives them as fractions.
    """

    twice: tuple[int, ...]
    height: int

    def __post_init__(self):
        twice = tuple(int(v) for v in self.twice)
        if any((v - self.height) % 2 for v in twice):
            raise StateError("reduced values must all be integers (even height) or all halves (odd)")
        object.__setattr__(self, "twice", twice)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.twice)

    @classmethod
    def from_values(cls, values: Sequence[Number], height: int) -> "ReducedState":
        twice = []
        for v in values:
            f = Fraction(v) * 2
            if f.denominator != 1:
                raise StateError(f"{v} is not a multiple of 1/2")
            twice.append(int(f))
        return cls(tuple(twice), height)


def reduce(c: ColumnState) -> ReducedState:
    s = height(c)
    return ReducedState(tuple(2 * v - s for v in c.counts[: c.prm.half]), s)


def ext(d: ReducedState, prm: NetworkParams) -> ColumnState:
    s = d.height
    left = [(v + s) // 2 for v in d.twice]
    right = [(s - v) // 2 for v in reversed(d.twice)]
    return ColumnState(tuple(left + right), prm)


def Cyc(x: Number) -> Number:
    return max(x, -x - 1)


def Min(x: Number) -> Number:
    return min(x, -x)


def Dec(i: int, x: Number) -> Number:
    return min(x, -x + 2**i - 1)


def MinMax(x: Number, y: Number) -> tuple[Number, Number]:
    return min(x, y), max(x, y)


def reduced_component(prm: NetworkParams, comp: tuple) -> tuple:
    """Reduced counterpart of a column map: ``("Cyc", 1)``, ``("Dec", j, i)``,
    ``("MinMax", j)`` or ``("Min", j)`` (positions 1-based)."""
    if comp[0] == "cyc":
        return ("Cyc", 1)
    if comp[0] == "dec":
        return ("Dec", comp[1], prm.k - comp[2] - 1)
    j = comp[1]
    return ("MinMax", j) if j < prm.half else ("Min", j)


def reduced_components(prm: NetworkParams, x: int) -> list[tuple]:
    return [reduced_component(prm, comp) for comp in q_components(prm, x)]


def _apply_reduced_twice(d: list[int], rc: tuple) -> None:
    kind, j = rc[0], rc[1] - 1
    v = d[j]
    if kind == "Cyc":
        d[j] = max(v, -v - 2)
    elif kind == "Min":
        d[j] = min(v, -v)
    elif kind == "Dec":
        d[j] = min(v, -v + 2 * (2 ** rc[2] - 1))
    else:
        d[j], d[j + 1] = min(v, d[j + 1]), max(v, d[j + 1])


def reduced_q_stage(x: int, d: ReducedState, prm: NetworkParams) -> ReducedState:
    vals = list(d.twice)
    for rc in reduced_components(prm, x):
        _apply_reduced_twice(vals, rc)
    return ReducedState(tuple(vals), d.height)


# --- interval descriptors ----------------------------------------------------

NEG = "-k"
PM = "+-k"
Descriptor = Union[int, str]


def interval_twice(w: Descriptor, k: int) -> tuple[int, int]:
    """Doubled end points of the interval named by descriptor ``w``."""
    top = 2 ** (k - 1) - 1
    if w == NEG:
        return -top, 0
    if w == PM:
        return -top, top
    if isinstance(w, int) and 0 <= w <= k - 1:
        return -1, (2**w - 1 if w else 0)
    raise StateError(f"no interval for descriptor {w!r} with k={k}")


def interval_of(w: Descriptor, k: int) -> tuple[Fraction, Fraction]:
    lo, hi = interval_twice(w, k)
    return Fraction(lo, 2), Fraction(hi, 2)


def descriptor_str(w: Descriptor, k: int) -> str:
    return {NEG: f"-{k}", PM: f"±{k}"}.get(w, str(w)) if isinstance(w, str) else str(w)


def _e(prm: NetworkParams, x: int, l: int) -> int:
    p, k = prm.p, prm.k
    v = max(0, k - (p - 2) * (l - 1) - (x + l - 1) % p)
    if v >= k:
        raise StateError(f"descriptor {v} out of range at x={x}, l={l}")
    return v


def _special(prm: NetworkParams, x: int, l: int) -> bool:
    return (x + l) % prm.p == 1 % prm.p


def seq_u(prm: NetworkParams, x: int) -> tuple[Descriptor, ...]:
    return tuple(NEG if _special(prm, x, l) else PM for l in range(1, prm.half + 1))


def seq_v(prm: NetworkParams, x: int) -> tuple[Descriptor, ...]:
    return tuple(NEG if _special(prm, x, l) else _e(prm, x, l) for l in range(1, prm.half + 1))


def seq_w(prm: NetworkParams, x: int) -> tuple[Descriptor, ...]:
    return tuple(0 if _special(prm, x, l) else _e(prm, x, l) for l in range(1, prm.half + 1))


def seq_z(prm: NetworkParams) -> tuple[Descriptor, ...]:
    return (0,) * prm.half


def join(i: int, a: Sequence, b: Sequence) -> tuple:
    return tuple(a[:i]) + tuple(b[i:])


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def state_sequence(prm: NetworkParams, i: int) -> tuple[Descriptor, ...]:
    """Descriptor sequence bounding a reduced balanced state after ``i`` steps."""
    p, m = prm.p, prm.half
    last = prm.balanced_stages
    if not 1 <= i <= last:
        raise ParameterError(f"state sequence index {i} outside 1..{last}")
    x = i % p
    if i <= m * (p - 1) - 1:
        return join(_ceil_div(i + 1, p - 1), seq_v(prm, x), seq_u(prm, x))
    if i <= m * p - 1:
        return join(m * p - i, seq_v(prm, x), seq_w(prm, x))
    return join(_ceil_div(i + 1 - m * p, p - 1), seq_z(prm), seq_w(prm, x))


def contains(seq: Sequence[Descriptor], d: ReducedState | Sequence[int], k: int) -> bool:
    """Is the (doubled) reduced state inside the box described by ``seq``?"""
    twice = d.twice if isinstance(d, ReducedState) else d
    for w, v in zip(seq, twice):
        lo, hi = interval_twice(w, k)
        if not lo <= v <= hi:
            return False
    return True


# --- lower / upper bounds ----------------------------------------------------


def _step_index(track: Sequence[int]) -> int:
    """1-based i with track[i-1] < track[i], or len(track) if constant."""
    for i in range(len(track) - 1):
        if track[i] < track[i + 1]:
            return i + 1
    return len(track)


def bounds(c: ColumnState) -> tuple[ColumnState, ColumnState]:
    """Balanced lower and upper bounds of an unbalanced 2-flat state."""
    if not is_2flat(c):
        raise StateError(f"bounds need a 2-flat state, got {c.counts}")
    if is_balanced(c):
        raise StateError(f"state {c.counts} is balanced; bounds are for unbalanced states")
    b = c.prm.b
    i = _step_index(c.counts[0::2])
    j = _even_step_from_end(c)
    lower, upper = [0] * b, [0] * b
    for l in range(1, b + 1):
        odd = l % 2 == 1
        if i < j:
            lower[l - 1] = (c[1] if l <= 2 * j - 1 else c[b - 1]) if odd else c[l]
            upper[l - 1] = c[b - 1] if odd else c[b]
        else:
            lower[l - 1] = c[1] if odd else c[2]
            upper[l - 1] = c[l] if odd else (c[2] if l <= b - 2 * i else c[b])
    return ColumnState(tuple(lower), c.prm), ColumnState(tuple(upper), c.prm)


def _even_step_from_end(c: ColumnState) -> int:
    b = c.prm.b
    m = b // 2
    for j in range(1, m):
        if c[b - 2 * j] < c[b - 2 * j + 2]:
            return j
    return m


# --- enumeration -------------------------------------------------------------


def flat_track(total: int, length: int) -> list[int]:
    """The unique flat sequence of ``length`` integers summing to ``total``."""
    v, r = divmod(total, length)
    return [v] * (length - r) + [v + 1] * r


def two_flat_count(prm: NetworkParams) -> int:
    return (prm.n * prm.half + 1) ** 2


def two_flat_states(prm: NetworkParams) -> np.ndarray:
    """All 2-flat states with entries in [0, n], one per row.

    Each track is a flat sequence fixed by its sum (equivalently by a base value
    and a step position).
    """
    m = prm.half
    totals = np.arange(prm.n * m + 1)
    tracks = _tracks(totals, m)
    a = np.repeat(tracks, len(totals), axis=0)
    e = np.tile(tracks, (len(totals), 1))
    return _interleave_tracks(a, e)


def random_two_flat_states(prm: NetworkParams, count: int, rng: np.random.Generator) -> np.ndarray:
    top = prm.n * prm.half
    a = _tracks(rng.integers(0, top + 1, count), prm.half)
    e = _tracks(rng.integers(0, top + 1, count), prm.half)
    return _interleave_tracks(a, e)


def balanced_two_flat_states(prm: NetworkParams) -> np.ndarray:
    """All balanced 2-flat states: the even track mirrors ``height - odd track``."""
    m, n = prm.half, prm.n
    rows = []
    for t in range(n * m + 1):
        odd = flat_track(t, m)
        lo, hi = odd[-1], odd[0] + n
        for s in range(lo, hi + 1):
            rows.append(_balanced_from(odd, s))
    return np.array(rows, dtype=np.int64).reshape(-1, prm.b)


def random_balanced_two_flat_states(
    prm: NetworkParams, count: int, rng: np.random.Generator
) -> np.ndarray:
    m, n = prm.half, prm.n
    rows = []
    for t in rng.integers(0, n * m + 1, count):
        odd = flat_track(int(t), m)
        s = int(rng.integers(odd[-1], odd[0] + n + 1))
        rows.append(_balanced_from(odd, s))
    return np.array(rows, dtype=np.int64).reshape(-1, prm.b)


def _balanced_from(odd: list[int], s: int) -> list[int]:
    b = 2 * len(odd)
    out = [0] * b
    for u, v in enumerate(odd):
        out[2 * u] = v
        out[b - 1 - 2 * u] = s - v
    return out


def _tracks(totals: np.ndarray, m: int) -> np.ndarray:
    v, r = np.divmod(np.asarray(totals, dtype=np.int64), m)
    pos = np.arange(m)
    return v[:, None] + (pos[None, :] >= (m - r)[:, None])


def _interleave_tracks(a: np.ndarray, e: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0], 2 * a.shape[1]), dtype=np.int64)
    out[:, 0::2] = a
    out[:, 1::2] = e
    return out


# --- vectorised dynamics -----------------------------------------------------


def q_stage_batch(prm: NetworkParams, x: int, c: np.ndarray) -> None:
    """In-place stage ``x`` on a batch of column states (rows, 0-based columns)."""
    b = prm.b
    for comp in q_components(prm, x):
        if comp[0] == "cyc":
            first, last = c[:, 0].copy(), c[:, b - 1].copy()
            c[:, 0] = np.maximum(first, last - 1)
            c[:, b - 1] = np.minimum(first + 1, last)
        elif comp[0] == "dec":
            j, h = comp[1], prm.h(comp[2])
            lj, rj = c[:, j - 1].copy(), c[:, b - j].copy()
            c[:, j - 1] = np.minimum(lj, rj + h)
            c[:, b - j] = np.maximum(lj - h, rj)
        else:
            j = comp[1]
            for t in {j, b - j}:
                u, v = c[:, t - 1].copy(), c[:, t].copy()
                c[:, t - 1] = np.minimum(u, v)
                c[:, t] = np.maximum(u, v)


def reduced_stage_batch(prm: NetworkParams, x: int, d: np.ndarray) -> None:
    """In-place reduced stage ``x`` on doubled reduced states."""
    for rc in reduced_components(prm, x):
        kind, j = rc[0], rc[1] - 1
        v = d[:, j].copy()
        if kind == "Cyc":
            d[:, j] = np.maximum(v, -v - 2)
        elif kind == "Min":
            d[:, j] = np.minimum(v, -v)
        elif kind == "Dec":
            d[:, j] = np.minimum(v, -v + 2 * (2 ** rc[2] - 1))
        else:
            w = d[:, j + 1].copy()
            d[:, j] = np.minimum(v, w)
            d[:, j + 1] = np.maximum(v, w)


def flat_rows(c: np.ndarray) -> np.ndarray:
    return (c[:, :-1] <= c[:, 1:]).all(axis=1) & (c[:, -1] <= c[:, 0] + 1)


def balanced_rows(c: np.ndarray) -> np.ndarray:
    return (c + c[:, ::-1] == (c[:, 0] + c[:, -1])[:, None]).all(axis=1)


def iter_descriptor_boxes(prm: NetworkParams) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(i, lo, hi)`` doubled bounds of the box for every state index."""
    for i in range(1, prm.balanced_stages + 1):
        seq = state_sequence(prm, i)
        lo, hi = zip(*(interval_twice(w, prm.k) for w in seq))
        yield i, np.array(lo), np.array(hi)
