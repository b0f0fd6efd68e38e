"""Classical DY cohomology of pointed categories against the bar complex."""

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from dgdy.classical import (GroupTableError, PointedFusionData, bar_oracle, build_classical,
                            check_group_table, classical_fixture, cyclic_table, format_group_table,
                            group_table, hdy_classical, parse_group_table, symmetric3_table)
from dgdy.errors import ValidationError
from dgdy.exactfield import QQ, GF

GROUPS = ["trivial", "z2", "z3", "z4", "s3"]
FIELDS = ["Q", "F2", "F3"]


def betti(rep, top=5):
    return [rep.betti[n] for n in range(top)]


def test_cochain_dims():
    dy = build_classical(classical_fixture("z2", "Q"), 5)
    assert [dy.dim(n) for n in range(5)] == [1, 2, 4, 8, 16]
    assert dy.dim(6) == 0 and dy.dim(-1) == 0


def test_trivial_group_alternates():
    dy = build_classical(classical_fixture("trivial", "Q"), 6)
    assert [dy.rank(n) for n in range(6)] == [0, 1, 0, 1, 0, 1]
    assert betti(hdy_classical(classical_fixture("trivial", "Q"), 6), 6) == [1, 0, 0, 0, 0, 0]


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("field", FIELDS)
def test_oracle_equivalence(group, field):
    table = group_table(group)
    mine = hdy_classical(PointedFusionData(table, field), 5)
    other = bar_oracle(table, field, 5)
    assert betti(mine) == betti(other)
    assert mine.unreliable == other.unreliable == frozenset([5])


@pytest.mark.parametrize("group,field,expected", [
    ("z2", "F2", [1, 1, 1, 1, 1]),
    ("s3", "F3", [1, 0, 0, 1, 1]),
    ("z3", "F3", [1, 1, 1, 1, 1]),
    ("z4", "F2", [1, 1, 1, 1, 1]),
    ("s3", "F2", [1, 1, 1, 1, 1]),
    ("z3", "F2", [1, 0, 0, 0, 0]),
])
def test_known_values(group, field, expected):
    assert betti(hdy_classical(classical_fixture(group, field), 5)) == expected


@pytest.mark.parametrize("group", GROUPS)
def test_rigidity_over_rationals(group):
    assert betti(hdy_classical(classical_fixture(group, "Q"), 5)) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("n", range(4))
def test_differential_squares_to_zero(n):
    assert build_classical(classical_fixture("s3", "F3"), 5).check_square(n)


def test_sparse_and_dense_rank_agree():
    from dgdy.exactfield import rank
    dy = build_classical(classical_fixture("z3", "F3"), 3)
    assert [dy.rank(n) for n in range(3)] == [rank(dy.matrix(n)) for n in range(3)]


@given(st.permutations([1, 2, 3, 4, 5]), st.sampled_from(FIELDS))
def test_relabel_invariance(perm, field):
    pfd = classical_fixture("s3", field)
    moved = pfd.relabel([0] + list(perm))
    assert check_group_table(moved.table) == []
    assert betti(hdy_classical(moved, 4), 4) == betti(hdy_classical(pfd, 4), 4)


def test_nontrivial_cocycle_same_cohomology():
    # omega(1, 1, 1) = -1 is the nontrivial class for Z/2 over Q
    om = {(1, 1, 1): -1}
    twisted = PointedFusionData(cyclic_table(2), "Q", om, name="z2-twisted")
    assert twisted.cocycle_defect() is None
    assert betti(hdy_classical(twisted, 5)) == betti(hdy_classical(classical_fixture("z2", "Q"), 5))


def test_non_cocycle_rejected():
    with pytest.raises(ValidationError, match="3-cocycle"):
        PointedFusionData(cyclic_table(3), "Q", {(1, 1, 1): 2})


def test_planted_non_associative_table():
    t = [row[:] for row in symmetric3_table()]
    # swap two entries in one row: still a Latin square with identity 0
    r = t[1]
    i, j = r.index(2), r.index(3)
    r[i], r[j] = r[j], r[i]
    problems = check_group_table(t)
    assert any("not associative" in p for p in problems)
    with pytest.raises(GroupTableError, match="associative at triple"):
        PointedFusionData(t, "Q")
    with pytest.raises(GroupTableError):
        bar_oracle(t, "Q", 3)


@pytest.mark.parametrize("table,fragment", [
    ([[0, 1], [1, 1]], "no inverse"),
    ([[1, 0], [0, 1]], "identity"),
    ([[0, 1], [1]], "length"),
    ([[0, 2], [2, 0]], "not an index"),
    ([], "empty"),
])
def test_table_problems(table, fragment):
    assert any(fragment in p for p in check_group_table(table))


def test_parse_and_format_roundtrip():
    for name in GROUPS:
        t = group_table(name)
        assert parse_group_table(format_group_table(t)) == t
    assert parse_group_table("# Z/2\n2\n0 1\n1 0\n") == [[0, 1], [1, 0]]
    for bad in ("", "2\n0 1\n", "2\n0 x\n1 0\n", "2 2\n0 1\n1 0\n"):
        with pytest.raises(ValueError):
            parse_group_table(bad)


def test_group_names():
    assert group_table("Z/5") == cyclic_table(5)
    assert group_table("S3") == symmetric3_table()
    with pytest.raises(KeyError):
        group_table("a5")


def test_symmetric3_is_a_group():
    t = symmetric3_table()
    assert check_group_table(t) == []
    assert any(t[a][b] != t[b][a] for a, b in itertools.product(range(6), repeat=2))


def test_top_degree_flagged():
    rep = hdy_classical(classical_fixture("z2", GF(2)), 3)
    assert rep.unreliable == frozenset([3])


def test_random_cyclic_groups_match_oracle():
    rng = random.Random(7)
    for _ in range(4):
        n = rng.randint(2, 6)
        p = rng.choice([2, 3, 5])
        fld = GF(p)
        got = betti(hdy_classical(PointedFusionData(cyclic_table(n), fld), 4), 4)
        # H^k(Z/n; F_p) is 1-dimensional in every degree when p | n, else only in degree 0
        assert got == ([1, 1, 1, 1] if n % p == 0 else [1, 0, 0, 0])
    assert betti(hdy_classical(PointedFusionData(cyclic_table(4), QQ), 4), 4) == [1, 0, 0, 0]
