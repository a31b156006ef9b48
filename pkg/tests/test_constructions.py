import itertools
import math

import pytest

from pmerge.constructions import ParameterError, build_cw, build_m, build_p, columns, params
from pmerge.network import Comparator, apply_network, delay


@pytest.mark.parametrize(
    "p,k,n,b,N,D",
    [(4, 4, 7, 2, 14, 4), (4, 5, 15, 4, 60, 6), (5, 5, 15, 2, 30, 5), (4, 9, 255, 8, 2040, 12), (6, 10, 511, 4, 2044, 11)],
)
def test_params(p, k, n, b, N, D):
    prm = params(p, k)
    assert (prm.n, prm.b, prm.N, prm.D) == (n, b, N, D)
    assert prm.merge_stages == p * (b - 1)


def test_params_h():
    prm = params(4, 5)
    assert [prm.h(s) for s in range(1, 5)] == [7, 3, 1, 0]
    with pytest.raises(ParameterError):
        prm.h(5)


@pytest.mark.parametrize("p,k", [(4, 3), (2, 5), (3, 5), (1, 1)])
def test_params_rejects(p, k):
    with pytest.raises(ParameterError):
        params(p, k)


def test_p3_behind_flag():
    prm = params(3, 5, allow_p3=True)
    assert prm.b == 6
    assert build_m(3, 5, allow_p3=True).depth == 3


def test_cw_shape():
    net = build_cw(3)
    assert net.register_count == 8 and net.depth == 3
    assert [(c.lo, c.hi) for c in net.stages[0]] == [(0, 1), (2, 3), (4, 5), (6, 7)]


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cw_merges_and_sorts_small(k):
    net = build_cw(k)
    n = 2**k
    for v in itertools.product((0, 1), repeat=n):
        cur = list(v)
        for _ in range(k):
            cur, _ = apply_network(net, cur)
        assert cur == sorted(v)


def test_cw_rejects_k0():
    with pytest.raises(ParameterError):
        build_cw(0)


@pytest.mark.parametrize("p,k", [(p, k) for p in (3, 4, 5, 6) for k in range(max(p, 4), 10)])
def test_p_has_delay_p(p, k):
    net = build_p(p, k, allow_p3=True)
    prm = params(p, k, allow_p3=True)
    assert net.register_count == prm.N + 2
    assert net.depth == prm.D
    assert delay(net) == p


def test_p45_first_stage_and_boundary():
    prm = params(4, 5)
    s1 = build_p(4, 5).stages[0]
    assert Comparator(0, 1) in s1 and Comparator(prm.N, prm.N + 1) in s1
    assert {Comparator(prm.b * i, prm.b * i + 1) for i in range(1, prm.n)} <= set(s1)


def test_p45_long_comparator():
    # j=1, s=1: span 8 rows, from column 1 to the mirrored column b
    net = build_p(4, 5)
    assert Comparator(1, 4 * 7 + 4) in net.stages[1]


@pytest.mark.parametrize("p,k", [(4, 4), (4, 5), (5, 6), (6, 7)])
def test_m_is_p_restricted_and_folded(p, k):
    prm = params(p, k)
    m = build_m(p, k)
    pnet = build_p(p, k)
    inner = {
        Comparator(c.lo - 1, c.hi - 1) for c in pnet.comparators() if c.lo >= 1 and c.hi <= prm.N
    }
    assert m.comparators() == inner
    assert m.depth == p and m.register_count == prm.N


def test_columns_partition_registers():
    prm = params(4, 5)
    cols = columns(prm)
    assert len(cols) == prm.b and all(len(c) == prm.n for c in cols)
    assert sorted(itertools.chain(*cols)) == list(range(prm.N))


@pytest.mark.parametrize("p,k", [(4, 6), (5, 8), (6, 10)])
def test_runtime_bound(p, k):
    prm = params(p, k)
    assert prm.merge_stages <= 2 * p / (p - 2) * math.log2(prm.N) + p * (p - 8) / (p - 2) + 1e-9


@pytest.mark.parametrize("p,k", [(4, 4), (5, 5), (6, 6)])
def test_one_pass_of_p_equals_one_pass_of_m_when_depth_is_p(p, k):
    from pmerge.network import restrict
    from pmerge.verify import enumerate_two_sorted_01

    prm = params(p, k)
    assert prm.D == p
    inner = restrict(build_p(p, k), {0, prm.N + 1})
    m = build_m(p, k)
    for v in enumerate_two_sorted_01(prm.N):
        assert apply_network(inner, v) == apply_network(m, v)

