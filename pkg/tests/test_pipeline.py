import itertools
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permocc import mdd
from permocc.mdd import NodeBudgetExceeded
from permocc.oracle import brute_histogram, count_occurrences
from permocc.perms import (
    BASES,
    PermUniverse,
    complement,
    format_permutation,
    invert,
    parse_permutation,
    perm_elements,
    reverse,
)
from permocc.pipeline import (
    IdentityViolation,
    PatternJob,
    PsiTable,
    build_A,
    build_B,
    build_C,
    build_shuffles,
    build_tail,
    count,
    occurrence_diagram,
    reference_classes,
    psi_table,
    read_psi_csv,
    run_jobs,
    tables_to_csv,
    wilf_classes,
)


def elements(x):
    return [format_permutation(p) for p, m in perm_elements(x) for _ in range(m)]


def nonzero(h):
    return {r: c for r, c in h.items() if c}


@pytest.mark.parametrize("basis", BASES)
def test_worked_example_sets(basis):
    u = PermUniverse(4, basis)
    assert elements(build_A(4, 2, u)) == "1234 1243 1324 1342 1423 1432 2314 2341 2413 2431 3412 3421".split()
    assert elements(build_B(4, 2, (2, 1), u)) == ["2134"]
    assert elements(build_C(4, 2, u)) == "1234 1324 1342 3124 3142 3412".split()


@pytest.mark.parametrize("basis", BASES)
def test_worked_example_multiplicity(basis):
    d = occurrence_diagram(PatternJob(4, (2, 1)), basis=basis)
    u = d.universe
    assert d(u.assignment((2, 3, 1, 4))) == 2


@pytest.mark.parametrize("n", range(1, 8))
def test_build_A_shape(n):
    for k in range(1, n + 1):
        u = PermUniverse(n)
        a = build_A(n, k, u)
        assert mdd.cardinality_sum(a) == factorial(n) // factorial(k)
        if n <= 6:
            items = perm_elements(a)
            assert all(m == 1 for _, m in items)
            assert all(list(p[:k]) == sorted(p[:k]) for p, _ in items)
    assert elements(build_A(n, n, PermUniverse(n))) == [format_permutation(range(1, n + 1))]


def test_tail_fixes_prefix():
    n, k = 6, 2
    items = perm_elements(build_tail(n, k, PermUniverse(n)))
    assert len(items) == factorial(n - k)
    assert all(p[:k] == (1, 2) for p, _ in items)


@pytest.mark.parametrize("n", range(1, 8))
def test_C_is_inverse_of_sorted_shuffles(n):
    for k in range(1, n + 1):
        u = PermUniverse(n)
        c = [p for p, _ in perm_elements(build_C(n, k, u))]
        s = [p for p, _ in perm_elements(build_shuffles(n, k, u))]
        assert len(c) == comb(n, k)
        assert sorted(invert(p) for p in s) == c
        for p in s:
            assert list(p[:k]) == sorted(p[:k]) and list(p[k:]) == sorted(p[k:])


def test_build_B():
    u = PermUniverse(5)
    assert elements(build_B(5, 3, (1, 3, 2), u)) == ["13245"]
    with pytest.raises(ValueError):
        build_B(5, 2, (1, 3, 2), u)


@pytest.mark.parametrize("basis", BASES)
@pytest.mark.parametrize("tau", [(1,), (1, 2), (2, 1), (1, 2, 3), (2, 3, 1), (1, 3, 2, 4), (2, 4, 1, 3)])
def test_diagram_multiplicity_is_occurrence_count(basis, tau):
    n = 6
    d = occurrence_diagram(PatternJob(n, tau), basis=basis)
    u = d.universe
    for p in itertools.permutations(range(1, n + 1)):
        assert d(u.assignment(p)) == count_occurrences(p, tau)
    assert mdd.cardinality_sum(d) == comb(n, len(tau)) * factorial(n) // factorial(len(tau))


@pytest.mark.parametrize("n", range(2, 9))
def test_ascent_multiplicity_of_identity(n):
    d = occurrence_diagram(PatternJob(n, (1, 2)))
    assert d(d.universe.assignment(tuple(range(1, n + 1)))) == comb(n, 2)


@pytest.mark.parametrize("n", range(3, 8))
def test_identity_pattern_counts_increasing_subsequences(n):
    tau = (1, 2, 3)
    t = psi_table(PatternJob(n, tau))
    assert nonzero(t.psi) == nonzero(brute_histogram(n, tau))


def test_psi_table_examples():
    assert psi_table(PatternJob(5, (1, 4, 3, 2)))[2] == 5
    assert psi_table(PatternJob(6, (2, 1, 4, 3)))[1] == 88
    assert psi_table(PatternJob(5, (1, 2, 3)))[1] == 27


@given(st.integers(1, 6).flatmap(
    lambda k: st.tuples(st.integers(k, 7), st.permutations(list(range(1, k + 1))))))
def test_psi_table_matches_brute_force(args):
    n, tau = args
    t = count(n, tuple(tau))
    assert nonzero(t.psi) == nonzero(brute_histogram(n, tau))
    assert all(v == 0 for r, v in t.psi.items() if r > comb(n, len(tau)))


@pytest.mark.parametrize("n", range(4, 9))
def test_symmetries_preserve_tables(n):
    for tau in itertools.permutations(range(1, 5)):
        base = count(n, tau).psi
        for image in (reverse(tau), complement(tau), invert(tau)):
            assert count(n, image).psi == base


def test_pattern_longer_than_n():
    t = count(3, (1, 2, 3, 4))
    assert t.psi == {0: 6}
    assert t.to_csv() == "n,pattern,r,psi\n3,1234,0,6\n"


def test_pattern_job_validation():
    with pytest.raises(ValueError):
        PatternJob(3, (1, 2, 3, 4))
    with pytest.raises(ValueError):
        PatternJob(3, (1, 1))
    assert PatternJob(4, [2, 1]).pattern == (2, 1)


def test_identity_checks_reject_bad_tables():
    with pytest.raises(IdentityViolation):
        PsiTable(3, (1, 2), {0: 1, 1: 4}).check()
    with pytest.raises(IdentityViolation):
        PsiTable(3, (1, 2), {0: 4, 4: 1, 5: 1}).check()
    with pytest.raises(IdentityViolation):
        PsiTable(2, (1, 2), {0: 0, 1: 3, 2: -1}).check()
    PsiTable(3, (1, 2), {0: 1, 1: 2, 2: 2, 3: 1}).check()


def test_csv_round_trip():
    tables = [count(5, (1, 3, 2)), count(4, (2, 1))]
    text = tables_to_csv(tables)
    assert text.startswith("n,pattern,r,psi\n")
    back = read_psi_csv(text)
    assert [(t.n, t.pattern, t.psi) for t in back] == [(t.n, t.pattern, t.psi) for t in tables]


def test_wide_pattern_formatting():
    p = parse_permutation("2,1,3,4,5,6,7,8,9,10")
    t = count(10, p)
    assert t.rows()[0][1] == "2,1,3,4,5,6,7,8,9,10"
    assert t[1] == 1


def test_node_budget_abort():
    with pytest.raises(NodeBudgetExceeded) as info:
        psi_table(PatternJob(7, (1, 3, 2, 4)), node_budget=200)
    assert info.value.node_count >= 200


def test_run_jobs_in_parallel_matches_serial():
    jobs = [(n, (2, 4, 1, 3)) for n in range(4, 8)]
    serial = run_jobs(jobs)
    parallel = run_jobs(jobs, workers=2)
    assert [t.psi for t in serial] == [t.psi for t in parallel]


def test_wilf_classes_small():
    assert wilf_classes(3, 6) == reference_classes(3)
    assert len(reference_classes(4)) == 7
    assert sum(len(c) for c in reference_classes(4)) == 24
    # at n_max = k every pattern occurs once in itself only, so all merge
    assert wilf_classes(3, 3) == [("123", "132", "213", "231", "312", "321")]
    coarse = wilf_classes(4, 5)
    assert len(coarse) < 7
    for fine in reference_classes(4):
        assert any(set(fine) <= set(c) for c in coarse)
