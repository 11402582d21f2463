import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permocc import mdd
from permocc.mdd import (
    EMPTY_EDGE,
    FALSE,
    TRUE,
    Mode,
    NodeBudgetExceeded,
    Universe,
    UniverseMismatch,
    from_assignments,
    from_rows,
)

MODES = [Mode.MBDD, Mode.MZDD]


def all_assignments(V):
    return [list(bits) for bits in itertools.product([False, True], repeat=V)]


def table(x):
    """Explicit ``{assignment: multiplicity}`` of a diagram, zeros dropped."""
    V = x.universe.num_vars
    out = {}
    for bits in all_assignments(V):
        m = x(bits)
        if m:
            out[tuple(bits)] = m
    return out


@st.composite
def explicit(draw, V=None):
    V = draw(st.integers(0, 5)) if V is None else V
    points = draw(
        st.dictionaries(
            st.tuples(*[st.booleans()] * V),
            st.integers(1, 50),
            max_size=12,
        )
    )
    return V, points


def reference_mbdd():
    u = Universe(2, Mode.MBDD)
    rows = [(1, (FALSE, 0), (TRUE, 1)), (0, (TRUE, 7), (2, 13))]
    return from_rows(u, rows, (3, 2))


def test_reference_mbdd_evaluations():
    x = reference_mbdd()
    got = [x([a, b]) for a, b in [(0, 0), (0, 1), (1, 0), (1, 1)]]
    assert got == [14, 14, 0, 26]


def test_reference_mbdd_histogram_and_cardinality():
    x = reference_mbdd()
    assert mdd.multiplicity_histogram(x, check=True) == {0: 1, 14: 2, 26: 1}
    assert mdd.cardinality_sum(x) == 54


def test_reference_mbdd_dump_layout():
    text = mdd.dump(reference_mbdd())
    assert text.splitlines()[-1].startswith("root=(")
    assert all(line.startswith("row ") for line in text.splitlines()[:-1])


def test_base_and_empty():
    for mode in MODES:
        u = Universe(3, mode)
        base, empty = mdd.make_base(u), mdd.make_empty(u)
        assert table(base) == ({(False,) * 3: 1} if mode is Mode.MZDD else
                               {bits: 1 for bits in itertools.product([False, True], repeat=3)})
        assert table(empty) == {}
        assert mdd.cardinality_sum(empty) == 0
        assert mdd.multiplicity_histogram(empty) == {0: 8}


def test_mbdd_skipped_variable_is_dont_care():
    u = Universe(2, Mode.MBDD)
    e = u.make_edge(0, (TRUE, 1), (TRUE, 3))
    x = mdd.Multiset(e, u)
    assert [x(list(b)) for b in all_assignments(2)] == [1, 1, 3, 3]


def test_mzdd_skipped_variable_must_be_false():
    u = Universe(2, Mode.MZDD)
    e = u.make_edge(0, (TRUE, 1), (TRUE, 3))
    x = mdd.Multiset(e, u)
    assert [x(list(b)) for b in all_assignments(2)] == [1, 0, 3, 0]


def test_reduction_rules():
    z = Universe(2, Mode.MZDD)
    assert z.make_edge(0, (TRUE, 4), EMPTY_EDGE) == (TRUE, 4)
    b = Universe(2, Mode.MBDD)
    assert b.make_edge(0, (TRUE, 4), (TRUE, 4)) == (TRUE, 4)
    assert b.size == 0 and z.size == 0


def test_gcd_factoring_shares_nodes():
    u = Universe(1, Mode.MZDD)
    a = u.make_edge(0, (TRUE, 2), (TRUE, 4))
    c = u.make_edge(0, (TRUE, 3), (TRUE, 6))
    assert a[0] == c[0] and (a[1], c[1]) == (2, 3)
    assert u.lo(a[0]) == (TRUE, 1) and u.hi(a[0]) == (TRUE, 2)


def test_variable_order_is_enforced():
    u = Universe(3, Mode.MZDD)
    low = u.make_edge(1, (TRUE, 1), (TRUE, 1))
    with pytest.raises(ValueError):
        u.make_edge(2, (TRUE, 1), low)


def test_node_budget():
    u = Universe(8, Mode.MZDD, node_budget=3)
    with pytest.raises(NodeBudgetExceeded) as info:
        from_assignments(u, [([True] * 8, 1)])
    assert info.value.budget == 3
    assert isinstance(info.value, MemoryError)


def test_multiplier_overflow():
    u = Universe(1, Mode.MZDD, max_multiplier=100)
    x = from_assignments(u, [([True], 60)])
    with pytest.raises(OverflowError):
        x + x
    with pytest.raises(OverflowError):
        x * 2


def test_scale_rejects_non_positive():
    u = Universe(1)
    with pytest.raises(ValueError):
        mdd.make_base(u) * 0


def test_universe_mismatch():
    a, b = Universe(2), Universe(2)
    with pytest.raises(UniverseMismatch):
        mdd.make_base(a) + mdd.make_base(b)


def test_assignment_length_checked():
    u = Universe(2)
    with pytest.raises(ValueError):
        mdd.make_base(u)([True])


def test_wide_universe_histogram_uses_exact_integers():
    V = 70
    u = Universe(V, Mode.MZDD)
    bits = [i % 3 == 0 for i in range(V)]
    x = from_assignments(u, [(bits, 5), ([False] * V, 2)])
    h = mdd.multiplicity_histogram(x)
    assert h == {0: 2**V - 2, 2: 1, 5: 1}


def test_cache_stats_and_clear():
    u = Universe(3)
    x = from_assignments(u, [([True, False, True], 1), ([False, True, True], 2)])
    x + x
    stats = mdd.cache_stats(u)
    assert stats["nodes"] == u.size
    assert stats["union_misses"] >= 1
    u.clear_caches()
    assert mdd.cache_stats(u)["union_entries"] == 0


def test_cache_limit_flushes():
    u = Universe(6, cache_limit=2)
    from_assignments(u, [(list(b), 1) for b in all_assignments(6)[:20]])
    assert u.cache_stats()["flushes"] > 0


@pytest.mark.parametrize("mode", MODES)
@given(data=explicit())
def test_round_trip_and_canonical(mode, data):
    V, points = data
    u = Universe(V, mode)
    x = from_assignments(u, points.items())
    assert table(x) == points
    u.check_canonical(x.root)
    # any other build order lands on the same root
    y = from_assignments(u, reversed(list(points.items())))
    assert x == y


@pytest.mark.parametrize("mode", MODES)
@given(data=st.integers(0, 4).flatmap(lambda V: st.tuples(explicit(V), explicit(V))))
def test_union_adds_multiplicities(mode, data):
    (V, p), (_, q) = data
    u = Universe(V, mode)
    x, y = from_assignments(u, p.items()), from_assignments(u, q.items())
    want = dict(p)
    for k, v in q.items():
        want[k] = want.get(k, 0) + v
    assert table(x + y) == want
    assert x + y == y + x
    assert (x + y) + x == x + (y + x)
    assert x + mdd.make_empty(u) == x


@pytest.mark.parametrize("mode", MODES)
@given(data=explicit(), c=st.integers(1, 9))
def test_scale_and_distributivity(mode, data, c):
    V, points = data
    u = Universe(V, mode)
    x = from_assignments(u, points.items())
    assert table(x * c) == {k: v * c for k, v in points.items()}
    assert (x + x) * c == x * (2 * c)


@pytest.mark.parametrize("mode", MODES)
@given(data=explicit())
def test_histogram_and_cardinality_match_enumeration(mode, data):
    V, points = data
    u = Universe(V, mode)
    x = from_assignments(u, points.items())
    want = {}
    for bits in all_assignments(V):
        m = x(bits)
        want[m] = want.get(m, 0) + 1
    assert mdd.multiplicity_histogram(x, check=True) == dict(sorted(want.items()))
    assert mdd.cardinality_sum(x) == sum(points.values())


@given(data=explicit())
def test_node_count_is_reachable_rows(data):
    V, points = data
    u = Universe(V)
    x = from_assignments(u, points.items())
    assert mdd.node_count(x) == len(u.reachable([x.root])) <= u.size
