import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmerge import columns as col
from pmerge.constructions import ParameterError, params
from pmerge.verify import bounds_batch, column_counts, sorted_column_registers

GRID = [(4, 4), (4, 5), (4, 6), (5, 5), (5, 7), (6, 6), (6, 8), (4, 9)]


def state(prm, counts):
    return col.ColumnState(tuple(counts), prm)


@st.composite
def states(draw, balanced=False):
    p, k = draw(st.sampled_from(GRID[:7]))
    prm = params(p, k)
    if balanced:
        s = draw(st.integers(0, 2 * prm.n))
        left = [draw(st.integers(max(0, s - prm.n), min(prm.n, s))) for _ in range(prm.half)]
        counts = left + [s - v for v in reversed(left)]
    else:
        counts = draw(st.lists(st.integers(0, prm.n), min_size=prm.b, max_size=prm.b))
    return state(prm, counts)


def test_dec_example():
    prm = params(4, 5)
    assert col.dec(state(prm, (10, 2, 7, 1)), 1, 2).counts == (4, 2, 7, 7)


def test_mov_example():
    prm = params(4, 5)
    assert col.mov(state(prm, (5, 3, 9, 2)), 1).counts == (3, 5, 2, 9)
    # middle pair: both halves name the same two columns
    prm = params(4, 8)
    assert col.mov(state(prm, (0, 0, 9, 4, 0, 0)), 3).counts == (0, 0, 4, 9, 0, 0)


def test_cyc_example():
    prm = params(4, 4)
    assert col.cyc(state(prm, (2, 7))).counts == (6, 3)
    assert col.cyc(state(prm, (3, 4))).counts == (3, 4)


def test_state_validation():
    prm = params(4, 5)
    with pytest.raises(col.StateError):
        state(prm, (1, 2, 3))
    with pytest.raises(col.StateError):
        state(prm, (1, 2, 3, 16))
    with pytest.raises(col.StateError):
        col.dec(state(prm, (0, 0, 0, 0)), 3, 1)


def test_q_components_disjoint_and_range():
    for p, k in GRID:
        prm = params(p, k)
        for x in range(1, p + 1):
            col.q_components(prm, x)  # raises on overlap
    with pytest.raises(ParameterError):
        col.q_components(params(4, 5), 5)


def test_every_long_level_used_once_per_pass():
    for p, k in GRID:
        prm = params(p, k)
        decs = [c for x in range(1, p + 1) for c in col.q_components(prm, x) if c[0] == "dec"]
        for j in range(1, prm.half + 1):
            assert sorted(c[2] for c in decs if c[1] == j) == list(prm.long_levels(j))


def test_predicates():
    assert col.is_flat((2, 2, 3)) and not col.is_flat((2, 4, 3)) and not col.is_flat((1, 2, 3))
    assert col.is_2flat((1, 5, 2, 5)) and not col.is_2flat((2, 5, 1, 5))
    assert col.is_balanced((1, 2, 4, 5)) and col.height((1, 2, 4, 5)) == 6
    with pytest.raises(col.StateError):
        col.height((1, 2, 4, 6))


def test_reduce_example():
    d = col.reduce(state(params(4, 5), (1, 2, 4, 5)))
    assert d.values == (Fraction(-2), Fraction(-1)) and d.height == 6
    assert col.ext(d, params(4, 5)).counts == (1, 2, 4, 5)


def test_reduced_state_parity():
    with pytest.raises(col.StateError):
        col.ReducedState((1, 2), 4)
    assert col.ReducedState.from_values([Fraction(-1, 2)], 3).twice == (-1,)
    with pytest.raises(col.StateError):
        col.ReducedState.from_values([Fraction(1, 3)], 3)


def test_reduced_maps():
    assert col.Cyc(Fraction(-3, 2)) == Fraction(1, 2)
    assert col.Min(3) == -3
    assert col.Dec(2, 5) == -2
    assert col.MinMax(4, 1) == (1, 4)


@given(states(), st.data())
def test_stage_batch_matches_scalar(c, data):
    x = data.draw(st.integers(1, c.prm.p))
    arr = np.array([c.counts])
    col.q_stage_batch(c.prm, x, arr)
    assert tuple(arr[0]) == col.q_stage(x, c).counts


@given(states(balanced=True), st.data())
def test_reduced_stage_commutes_with_reduce(c, data):
    x = data.draw(st.integers(1, c.prm.p))
    after = col.q_stage(x, c)
    assert col.is_balanced(after)
    red = col.reduced_q_stage(x, col.reduce(c), c.prm)
    assert red == col.reduce(after)
    arr = np.array([col.reduce(c).twice])
    col.reduced_stage_batch(c.prm, x, arr)
    assert tuple(arr[0]) == red.twice


@given(states())
def test_flat_iff_registers_sorted(c):
    regs = sorted_column_registers(c.prm, np.array([c.counts]))[0]
    assert col.is_flat(c) == bool((np.diff(regs.astype(int)) >= 0).all())
    assert tuple(column_counts(c.prm, regs[None])[0]) == c.counts


@pytest.mark.parametrize("p,k", [(4, 4), (5, 5), (4, 5)])
def test_two_flat_states_are_two_sorted_inputs(p, k):
    prm = params(p, k)
    h = prm.N // 2
    seen = set()
    for a in range(h + 1):
        for e in range(h + 1):
            regs = np.zeros(prm.N, dtype=np.uint8)
            regs[0::2][h - a :] = 1
            regs[1::2][h - e :] = 1
            seen.add(tuple(column_counts(prm, regs[None])[0]))
    enum = col.two_flat_states(prm)
    assert len(enum) == col.two_flat_count(prm) == (h + 1) ** 2
    assert {tuple(r) for r in enum} == seen


@pytest.mark.parametrize("p,k", [(4, 4), (4, 5), (4, 6), (5, 6)])
def test_balanced_enumeration(p, k):
    prm = params(p, k)
    allst = col.two_flat_states(prm)
    expect = {tuple(r) for r in allst[col.balanced_rows(allst)]}
    got = col.balanced_two_flat_states(prm)
    assert len(got) == len(expect) and {tuple(r) for r in got} == expect


def test_random_two_flat_states_are_two_flat(rng):
    prm = params(5, 9)
    for r in col.random_two_flat_states(prm, 200, rng):
        assert col.is_2flat(r)
    for r in col.random_balanced_two_flat_states(prm, 200, rng):
        assert col.is_2flat(r) and col.is_balanced(r)


def test_flat_track():
    assert col.flat_track(7, 3) == [2, 2, 3]
    assert col.flat_track(0, 2) == [0, 0]


@pytest.mark.parametrize("p,k", [(4, 4), (4, 5), (5, 6), (6, 7)])
def test_two_flat_becomes_flat(p, k):
    prm = params(p, k)
    for counts in col.two_flat_states(prm)[::7]:
        assert col.is_flat(col.run_q(state(prm, counts), prm.merge_stages)[-1])


def test_intervals():
    assert col.interval_twice(0, 5) == (-1, 0)
    assert col.interval_twice(3, 5) == (-1, 7)
    assert col.interval_twice(col.NEG, 5) == (-15, 0)
    assert col.interval_twice(col.PM, 5) == (-15, 15)
    assert col.interval_of(1, 5) == (Fraction(-1, 2), Fraction(1, 2))
    assert col.descriptor_str(col.PM, 5) == "±5"
    with pytest.raises(col.StateError):
        col.interval_twice(5, 5)


def test_state_sequence_shape_and_range():
    prm = params(4, 5)
    assert col.join(1, (1, 2), ("a", "b")) == (1, "b")
    for i in range(1, prm.balanced_stages + 1):
        assert len(col.state_sequence(prm, i)) == prm.half
    with pytest.raises(ParameterError):
        col.state_sequence(prm, prm.balanced_stages + 1)
    # the last box pins everything to I(0)
    assert col.state_sequence(prm, prm.balanced_stages) == (0, 0)


def test_contains():
    assert col.contains((0, col.PM), (-1, 9), 5)
    assert not col.contains((0, col.PM), (1, 9), 5)


def test_bounds_example():
    prm = params(4, 5)
    lo, up = col.bounds(state(prm, (1, 3, 2, 3)))
    assert col.is_balanced(lo) and col.is_balanced(up)
    assert col.height(up) == col.height(lo) + 1
    with pytest.raises(col.StateError):
        col.bounds(state(prm, (1, 2, 4, 5)))
    with pytest.raises(col.StateError):
        col.bounds(state(prm, (3, 0, 1, 0)))


@pytest.mark.parametrize("p,k", [(4, 5), (4, 6), (5, 7)])
def test_bounds_sandwich_and_batch(p, k):
    prm = params(p, k)
    allst = col.two_flat_states(prm)
    unb = allst[~col.balanced_rows(allst)][::5]
    lo_b, up_b = bounds_batch(prm, unb)
    for r, lb, ub in zip(unb, lo_b, up_b):
        lo, up = col.bounds(state(prm, r))
        assert lo.counts == tuple(lb) and up.counts == tuple(ub)
        assert all(a <= v <= b for a, v, b in zip(lo.counts, r, up.counts))


def test_bounds_constant_odd_track():
    prm = params(4, 5)
    c = state(prm, (1, 1, 1, 2))
    lo, up = col.bounds(c)
    assert col.is_balanced(lo) and col.is_balanced(up)
    assert col.height(up) == col.height(lo) + 1
    assert all(a <= v <= b for a, v, b in zip(lo.counts, c.counts, up.counts))
