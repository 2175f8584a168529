import threading

import numpy as np
import pytest

from etacong.etaquotient import expand_at_infinity, parse_eta_quotient as P
from etacong.families import (FAMILIES, EtaSeriesOracle, OracleShortfall, PartitionOracle,
                              TableOracle, eta_oracle, family_oracle, get_family,
                              partition_table_mod)
from brute import colored_partitions, core3_triples, overpartition_count, partition_count


def test_partition_table_small():
    t = partition_table_mod(30, 10**6)
    assert [int(x) for x in t] == [partition_count(n) % 10**6 for n in range(31)]
    assert [int(x) for x in partition_table_mod(6, 1000)[4:]] == [5, 7, 11]


def test_ramanujan_congruences():
    for ell, r in ((5, 4), (7, 5), (11, 6)):
        t = partition_table_mod(20000, ell)
        assert not t[r::ell].any()


def test_partition_table_large_route():
    # the Frobenius route (above 2^20) agrees with the pentagonal recurrence
    n = (1 << 20) + 5000
    a = partition_table_mod(n, 5)
    from etacong.fastconv import partition_mod_kernel
    b = partition_mod_kernel(n, 5)
    assert np.array_equal(a.astype(np.int64), b)


def test_partition_oracle_support():
    o = PartitionOracle(7)
    assert o.fetch_many([-1, 23, 47, 119, 0, 24, -25]) == [1, 1, 2, 7 % 7, 0, 0, 0]


def test_partition_oracle_vs_expansion():
    f = expand_at_infinity(P("24:-1"), 24 * 400).reduce(13)
    o = eta_oracle(P("24:-1"), 13)
    assert isinstance(o, PartitionOracle)
    idx = list(range(-1, 24 * 400 - 1))
    assert o.fetch_many(idx) == [f.coefficient(i) for i in idx]


@pytest.mark.parametrize("name,m", [("overpartition", 3), ("overpartition", 5),
                                    ("color24", 13), ("core3", 5), ("core3", 7)])
def test_family_oracle_vs_expansion(name, m):
    X = get_family(name).quotient
    f = expand_at_infinity(X, 3000).reduce(m)
    o = family_oracle(name, m)
    idx = list(range(-2, 3000))
    assert o.fetch_many(idx) == [f.coefficient(i) for i in idx]


def test_family_offsets():
    assert family_oracle("overpartition", 10**9).fetch_many(range(6)) == \
        [overpartition_count(n) for n in range(6)]
    assert family_oracle("color24", 10**9).fetch_many(range(-1, 4)) == \
        [colored_partitions(24, n + 1) % 10**9 for n in range(-1, 4)]
    assert family_oracle("core3", 10**9).fetch_many(range(0, 8)) == \
        [0] + [core3_triples(n - 1) for n in range(1, 8)]


def test_overpartition_is_eta2_over_eta():
    # 1:-2,2:1 : overpartitions = prod (1+q^n)/(1-q^n)
    o = family_oracle("overpartition", 10**9)
    assert o.fetch(4) == 14 and o.fetch(10) == overpartition_count(10)


def test_dense_and_sampled_agree():
    X = P("1:-2,2:1")
    d = EtaSeriesOracle(X, 3, mode="dense")
    s = EtaSeriesOracle(X, 3, mode="sampled")
    idx = [5, 100, 9999, 47 * 47 * 11, 123457, 200000]
    assert d.fetch_many(idx) == s.fetch_many(idx)


def test_sampled_requires_support():
    with pytest.raises(ValueError):
        EtaSeriesOracle(P("1:-2,2:1"), 15, mode="sampled")


def test_growth_is_deterministic():
    X = P("1:-24")
    a = EtaSeriesOracle(X, 13)
    b = EtaSeriesOracle(X, 13, reach=50000)
    idx = [3, 4000, 4097, 9000, 49000]
    assert [a.fetch(i) for i in idx] == b.fetch_many(idx)


def test_limit_raises_shortfall():
    o = EtaSeriesOracle(P("1:-24"), 13, limit=1000)
    assert o.fetch(999) == EtaSeriesOracle(P("1:-24"), 13).fetch(999)
    with pytest.raises(OracleShortfall):
        o.fetch(1001)


def test_table_oracle():
    o = TableOracle([4, 5, 6], 5, start=10)
    assert o.fetch_many([9, 10, 12]) == [0, 4, 1]
    with pytest.raises(OracleShortfall):
        o.fetch(13)


def test_unknown_family():
    with pytest.raises(ValueError):
        get_family("nope")
    assert set(FAMILIES) == {"partition", "overpartition", "color24", "core3"}


def test_concurrent_fetches():
    o = EtaSeriesOracle(P("1:-2,2:1"), 3)
    ref = EtaSeriesOracle(P("1:-2,2:1"), 3, reach=80000).fetch_many(range(0, 80000, 97))
    got = {}

    def work(k):
        got[k] = o.fetch_many(range(0, 80000, 97)[k::4])

    ts = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    for k in range(4):
        assert got[k] == ref[k::4]
