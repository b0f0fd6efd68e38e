import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgdy.complexes import (CochainComplex, ComplexError, DoubleComplex, TotalSign, cohomology, components, totalize,
                            truncate)
from dgdy.exactfield import GF, QQ, Matrix, kernel_basis, rank


def M(fld, rows):
    return Matrix.from_rows(fld, rows)


def test_exact_pair():
    c = CochainComplex(QQ, {0: 1, 1: 1}, {0: M(QQ, [[1]])})
    assert cohomology(c).betti_list(0, 1) == [0, 0]


def test_zero_differential():
    c = CochainComplex(QQ, {0: 1, 1: 1}, {0: M(QQ, [[0]])})
    rep = cohomology(c)
    assert rep.betti_list(0, 1) == [1, 1]
    assert rep.representatives[0] == [[1]]


def test_rejects_nonzero_square():
    with pytest.raises(ComplexError):
        CochainComplex(QQ, {0: 1, 1: 1, 2: 1}, {0: M(QQ, [[1]]), 1: M(QQ, [[1]])})


def test_rejects_bad_shape():
    with pytest.raises(ComplexError):
        CochainComplex(QQ, {0: 1, 1: 2}, {0: M(QQ, [[1]])})


def bar_complex_z2(fld, top):
    """Inhomogeneous cochains of Z/2 with trivial coefficients, written out directly."""
    dims, diffs = {}, {}
    for n in range(top + 1):
        dims[n] = 2 ** n
    for n in range(top):
        src = list(itertools.product((0, 1), repeat=n))
        tgt = list(itertools.product((0, 1), repeat=n + 1))
        idx = {t: i for i, t in enumerate(src)}
        rows = []
        for g in tgt:
            row = [0] * len(src)
            row[idx[g[1:]]] += 1
            for i in range(n):
                merged = g[:i] + ((g[i] + g[i + 1]) % 2,) + g[i + 2:]
                row[idx[merged]] += (-1) ** (i + 1)
            row[idx[g[:-1]]] += (-1) ** (n + 1)
            rows.append(row)
        diffs[n] = M(fld, rows) if src else Matrix(fld, len(tgt), 1, [r[0] for r in rows])
    return CochainComplex(fld, dims, diffs)


def test_bar_z2_f2():
    rep = cohomology(bar_complex_z2(GF(2), 4))
    assert rep.betti_list(0, 3) == [1, 1, 1, 1]


def test_representatives_are_independent_classes():
    c = bar_complex_z2(GF(2), 4)
    rep = cohomology(c)
    for n in range(4):
        for v in rep.representatives.get(n, []):
            assert all(x == 0 for x in c.d(n).apply(v))
        img = c.d(n - 1).columns() if n > 0 else []
        span = Matrix.from_columns(GF(2), c.dim(n), img + rep.representatives[n]) if img else None
        if span is not None:
            assert rank(span) == rank(c.d(n - 1)) + rep.betti[n]


# -- truncation --------------------------------------------------------------

def five_term():
    fld = QQ
    return CochainComplex(fld, {0: 1, 1: 2, 2: 2, 3: 1, 4: 1},
                          {0: M(fld, [[1], [0]]), 1: M(fld, [[0, 1], [0, 0]]), 2: M(fld, [[0, 1]]),
                           3: M(fld, [[0]])})


def test_truncate_full_support_identity():
    c = five_term()
    t = truncate(c, 0, 4)
    assert t.dims == c.dims and not t.unreliable
    assert cohomology(t).betti == cohomology(c).betti


def test_truncate_left_term():
    c = CochainComplex(QQ, {0: 1, 1: 1}, {0: M(QQ, [[1]])})
    t = truncate(c, 0, 0)
    rep = cohomology(t)
    assert rep.betti[0] == 1 and 0 in rep.unreliable


def test_truncate_interior_unchanged():
    c = five_term()
    full = cohomology(c).betti
    t = cohomology(truncate(c, 0, 2))
    assert t.betti[1] == full[1] and t.betti[0] == full[0]
    assert 2 in t.unreliable


# -- double complexes ------------------------------------------------------------

def test_single_column():
    d = DoubleComplex(QQ, {(0, 0): 1, (0, 1): 1}, d_v={(0, 0): M(QQ, [[1]])})
    tot = totalize(d)
    assert tot.dims == {0: 1, 1: 1}
    assert cohomology(tot).betti_list(0, 1) == [0, 0]


def test_identity_square():
    one = M(QQ, [[1]])
    d = DoubleComplex(QQ, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                      d_h={(0, 0): one, (0, 1): one}, d_v={(0, 0): one, (1, 0): one})
    assert d.commutation() == "commute"
    for conv in TotalSign:
        tot = totalize(d, conv)
        for k in tot.dims:
            assert (tot.d(k + 1) @ tot.d(k)).is_zero()
        assert cohomology(tot).betti_list(0, 2) == [0, 0, 0]


def test_zero_square_betti():
    d = DoubleComplex(QQ, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert cohomology(totalize(d)).betti_list(0, 2) == [1, 2, 1]


def test_anticommuting_input_used_as_is():
    one, neg = M(QQ, [[1]]), M(QQ, [[-1]])
    d = DoubleComplex(QQ, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                      d_h={(0, 0): one, (0, 1): one}, d_v={(0, 0): one, (1, 0): neg})
    assert d.commutation() == "anticommute"
    tot = totalize(d)
    assert (tot.d(1) @ tot.d(0)).is_zero()


def test_no_consistent_sign():
    one, two = M(QQ, [[1]]), M(QQ, [[2]])
    d = DoubleComplex(QQ, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                      d_h={(0, 0): one, (0, 1): one}, d_v={(0, 0): one, (1, 0): two})
    with pytest.raises(ComplexError):
        totalize(d)


def test_one_row_is_that_row():
    one = M(QQ, [[1]])
    row = DoubleComplex(QQ, {(0, 2): 1, (1, 2): 1, (2, 2): 1}, d_h={(0, 2): one})
    tot = totalize(row)
    assert tot.dims == {2: 1, 3: 1, 4: 1}
    assert tot.d(2) == one


def test_component_order():
    d = DoubleComplex(QQ, {(n, m): 1 for n in range(3) for m in range(3)})
    assert components(d, 2) == [(0, 2), (1, 1), (2, 0)]


# -- properties --------------------------------------------------------------

@st.composite
def random_complexes(draw):
    """Random complexes: each differential factors through the cokernel of the previous one."""
    fld = draw(st.sampled_from([QQ, GF(2), GF(3)]))
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)
    length = rng.randint(1, 4)
    dims = {n: rng.randint(0, 3) for n in range(length + 1)}
    diffs = {}
    prev = None
    for n in range(length):
        src, tgt = dims[n], dims[n + 1]
        mat = Matrix(fld, tgt, src, [rng.randint(-2, 2) for _ in range(tgt * src)])
        if prev is not None and src:
            k = kernel_basis(prev.transpose())  # rows of k^t vanish on image(prev)
            if k.cols:
                coeffs = Matrix(fld, tgt, k.cols, [rng.randint(-2, 2) for _ in range(tgt * k.cols)])
                mat = coeffs @ k.transpose()
            else:
                mat = Matrix.zeros(fld, tgt, src)
        diffs[n] = mat
        prev = mat
    return CochainComplex(fld, dims, diffs)


@given(random_complexes())
def test_euler_characteristic(c):
    assert cohomology(c).euler_characteristic() == c.euler_characteristic()


@given(random_complexes())
def test_betti_formula(c):
    rep = cohomology(c)
    for n in c.dims:
        ker = c.dim(n) - rank(c.d(n))
        assert rep.betti[n] == ker - rank(c.d(n - 1))


@given(random_complexes(), st.data())
def test_basis_change_invariance(c, data):
    """Conjugating by permutations leaves the Betti numbers alone."""
    perms = {n: data.draw(st.permutations(range(c.dim(n)))) for n in c.dims}

    def pmat(n):
        p = perms.get(n, [])
        return Matrix(c.field, len(p), len(p), [[int(p[i] == j) for j in range(len(p))] for i in range(len(p))])

    diffs = {n: pmat(n + 1) @ c.d(n) @ pmat(n).transpose() for n in c.dims if n + 1 in c.dims}
    c2 = CochainComplex(c.field, c.dims, diffs)
    assert cohomology(c2).betti == cohomology(c).betti
