"""The DY double complex, its cohomology and first-order deformations."""

import itertools
import random

import pytest

from conftest import DY_FIXTURES, fixture_dy, fixture_structure
from dgdy.complexes import ComplexError, TotalSign
from dgdy.dgcore import validate_bimodule
from dgdy.dy import (Deformation, Orientation, build_dy, build_parenthesization, deformation_equivalent,
                     deformation_from_cocycle, first_order_deformations, hdy, hdy_table, perturb,
                     verify_deformed_pentagon)
from dgdy.errors import WindowError
from dgdy.structure import PseudoTensorStructure
from dgdy.exactfield import QQ, GF, rank
from dgdy.fixtures import (AlgElem, Elem, binary_monomials, kronecker_algebra, make_cyclic_group,
                           make_kronecker_p1, make_trivial, weighted_algebra, weighted_module,
                           weighted_structure)

HDY_EXPECTED = {
    ("trivial", "Q"): [0, 1, 0, 0, 0],
    ("product-field", "Q"): [0, 2, 0, 0, 0],
    ("kronecker-p1", "Q"): [0, 1, 0, 1, 1],
    ("kronecker-p1", "F5"): [0, 1, 0, 1, 1],
    ("cyclic-group-2", "Q"): [0, 1, 0, 0, 0],
    ("cyclic-group-2", "F2"): [0, 1, 1, 1, 1],
    ("cyclic-group-3", "F3"): [0, 1, 1, 1, 1],
}


def betti(dc, degrees=range(5)):
    return [hdy(dc, k).dim for k in degrees]


# -- parenthesizations ---------------------------------------------------------------

def test_parenthesization_small_cases():
    _, s = fixture_structure("kronecker-p1", "Q")
    assert build_parenthesization(s, 1).module.dims == s.gamma.dims
    ident = build_parenthesization(s, 0).module
    assert ident.n_left == 1 and ident.dims == {0: s.algebra.dim}
    assert build_parenthesization(s, -1).module.dims == s.unit.dims
    assert build_parenthesization(s, -2).module.dims == {}
    assert build_parenthesization(s, -5).tree is None


@pytest.mark.parametrize("n", [2, 3])
def test_left_and_right_combs_agree_in_size(n):
    _, s = fixture_structure("kronecker-p1", "Q")
    left = build_parenthesization(s, n, Orientation.LEFT)
    right = build_parenthesization(s, n, Orientation.RIGHT)
    assert left.n_left == right.n_left == n + 1
    assert left.module.dims == right.module.dims


@pytest.mark.parametrize("orientation", list(Orientation))
def test_replay_matches(orientation):
    _, s = fixture_structure("kronecker-p1", "Q")
    p = build_parenthesization(s, 3, orientation)
    again = p.replay(s)
    assert again.dims == p.module.dims
    assert validate_bimodule(again).ok


# -- shape of the complex ------------------------------------------------------------

def test_total_degree_components():
    dc = fixture_dy("kronecker-p1", "Q")
    for k in (3, 4):
        comps = dc.total_components(k)
        assert all(n + m == k for n, m in comps)
        assert sum(dc.dim(n, m) for n, m in comps) == dc.total().dim(k)
        assert sum(dc.dim(n, k - n) for n in range(k + 1)) == dc.total().dim(k)


def test_p1_dims_regression():
    dc = fixture_dy("kronecker-p1", "Q")
    nonzero = {b: d for b, d in dc.dims().items() if d}
    assert nonzero == {(0, 1): 1, (1, 1): 1, (2, 1): 2, (3, 1): 5, (4, 1): 11, (5, 1): 21}
    assert list(dc.rows()) == [0, 1, 2, 3, 4, 5]
    assert all(dc.complete(j) for j in range(6))
    assert not dc.complete(6)


def test_identity_is_a_vertical_cycle():
    for name, field in DY_FIXTURES:
        dc = fixture_dy(name, field)
        assert dc.dim(0, 1) >= 1
        dv = dc.vertical_differential(0, 1)
        assert all(x == 0 for x in dv.apply([1] + [0] * (dc.dim(0, 1) - 1)))


@pytest.mark.parametrize("name,field", DY_FIXTURES)
def test_differentials_square_to_zero(name, field):
    dc = fixture_dy(name, field)
    assert dc.check() == []
    tot = dc.total()
    for k in range(dc.max_n + 5):
        a, b = tot.d(k), tot.d(k + 1)
        if a.shape[0] and b.shape[1]:
            assert (b @ a).is_zero()


@pytest.mark.parametrize("name,field", DY_FIXTURES)
def test_hdy_values(name, field):
    assert betti(fixture_dy(name, field)) == HDY_EXPECTED[(name, field)]


# -- trivial structure: the closed form --------------------------------------------

def test_trivial_alternating_horizontal():
    _, s = make_trivial(QQ)
    dc = build_dy(s, max_n=6)
    for n in range(dc.max_n):
        d = dc.horizontal_differential(n, 1)
        assert d.shape == (1, 1)
        assert d[0, 0] == (0 if n % 2 == 0 else 1)
    # the complex k -0-> k -1-> k -0-> k ... has cohomology only in total degree 1
    assert betti(dc, range(6)) == [0, 1, 0, 0, 0, 0]


# -- basis independence --------------------------------------------------------------

def _shuffled_p1(seed, field):
    """The projective line fixture with every basis listed in a random order."""
    rng = random.Random(seed)
    A = kronecker_algebra(field)
    elems = [Elem(0, (l, i, j), mono) for i, j, l in itertools.product((0, 1), repeat=3)
             for mono in binary_monomials(l - i - j)]
    elems.append(Elem(-1, (0, 1, 1), (0, 0), xi=True))
    rng.shuffle(elems)
    units = [Elem(0, (l,), mono) for l in (0, 1) for mono in binary_monomials(l)]
    rng.shuffle(units)
    gamma = weighted_module(A, 2, elems, "G")
    unit = weighted_module(A, 0, units, "U")
    return weighted_structure(A, gamma, unit)


@pytest.mark.parametrize("seed", range(3))
def test_hdy_independent_of_basis_order(seed):
    s = _shuffled_p1(seed, QQ)
    assert betti(build_dy(s)) == HDY_EXPECTED[("kronecker-p1", "Q")]


def test_hdy_independent_of_algebra_basis_order():
    fld = GF(2)
    A = weighted_algebra(fld, [AlgElem("e1", 1, 1), AlgElem("e0", 0, 0)])
    gamma = weighted_module(A, 2, [Elem(0, ((a + b) % 2, a, b)) for a in (1, 0) for b in (0, 1)], "G")
    unit = weighted_module(A, 0, [Elem(0, (0,))], "U")
    s = weighted_structure(A, gamma, unit)
    assert betti(build_dy(s)) == HDY_EXPECTED[("cyclic-group-2", "F2")]


# -- window handling -----------------------------------------------------------------

def test_window_refusal():
    _, s = make_trivial(QQ)
    dc = build_dy(s, max_n=3)
    with pytest.raises(WindowError, match="HDY\\^4"):
        hdy(dc, 4)
    r = hdy(dc, 4, strict=False)
    assert r.unreliable
    assert not hdy(dc, 1).unreliable


def test_window_excluding_degree_zero_is_incomplete():
    _, s = make_kronecker_p1(QQ)
    dc = build_dy(s, degree_window=(1, 3))
    assert list(dc.rows()) == [2, 3, 4]
    with pytest.raises(WindowError):
        hdy(dc, 2)
    assert all(r.unreliable for r in hdy_table(dc, range(3)))


def test_bad_arguments():
    _, s = make_trivial(QQ)
    with pytest.raises(ValueError):
        build_dy(s, max_n=0)
    with pytest.raises(ValueError):
        build_dy(s, degree_window=(2, 1))


# -- conventions ---------------------------------------------------------------------

@pytest.mark.parametrize("name,field", [("kronecker-p1", "Q"), ("cyclic-group-2", "F2")])
def test_vertical_first_convention(name, field):
    _, s = fixture_structure(name, field)
    dc = build_dy(s, convention=TotalSign.VERTICAL_FIRST)
    assert betti(dc) == HDY_EXPECTED[(name, field)]
    for d in first_order_deformations(s, dc):
        assert verify_deformed_pentagon(s, d).ok


# -- deformations --------------------------------------------------------------------

@pytest.mark.parametrize("name,field", DY_FIXTURES)
def test_every_class_deforms_the_pentagon(name, field):
    _, s = fixture_structure(name, field)
    dc = fixture_dy(name, field)
    defs = first_order_deformations(s, dc)
    assert len(defs) == HDY_EXPECTED[(name, field)][4]
    for d in defs:
        rep = verify_deformed_pentagon(s, d)
        assert rep.eps0_ok and rep.eps1_ok, str(rep)


def test_product_field_has_no_deformations():
    _, s = fixture_structure("product-field", "Q")
    assert first_order_deformations(s, fixture_dy("product-field", "Q")) == []


def test_zero_deformation_is_coherence():
    _, s = fixture_structure("kronecker-p1", "Q")
    dc = fixture_dy("kronecker-p1", "Q")
    zero = deformation_from_cocycle(dc, [0] * dc.total().dim(4))
    rep = verify_deformed_pentagon(s, zero)
    assert rep.ok and rep.expected1.is_zero()


def test_non_cocycle_rejected():
    dc = fixture_dy("kronecker-p1", "Q")
    n4 = dc.total().dim(4)
    d4 = dc.d_tot(4)
    bad = next(e for e in ([int(i == j) for i in range(n4)] for j in range(n4)) if any(d4.apply(e)))
    with pytest.raises(ValueError, match="cocycle"):
        deformation_from_cocycle(dc, bad)


def test_perturbation_off_the_kernel_breaks_pentagon():
    """Hand-built eta^{3,1} outside the cocycles: the x^1 part must fail."""
    _, s = fixture_structure("kronecker-p1", "Q")
    dc = fixture_dy("kronecker-p1", "Q")
    d4 = dc.d_tot(4)
    n4 = dc.total().dim(4)
    found = 0
    for j in range(n4):
        e = [QQ.coerce(int(i == j)) for i in range(n4)]
        if not any(x != 0 for x in d4.apply(e)):
            continue
        blocks = dc.split(4, e)
        comp = lambda n, m: (dc.morphism(n, m, blocks[(n, m)]) if (n, m) in blocks  # noqa: E731
                             else dc.columns[n].zero(m - 1))
        d = Deformation(e, blocks, comp(3, 1), comp(4, 0), dc)
        assert not verify_deformed_pentagon(s, d).eps1_ok
        found += 1
    assert found


@pytest.mark.parametrize("name,field", [("kronecker-p1", "Q"), ("kronecker-p1", "F5"),
                                        ("cyclic-group-2", "F2"), ("cyclic-group-3", "F3")])
@pytest.mark.parametrize("seed", range(2))
def test_coboundary_perturbation_is_equivalent(name, field, seed):
    _, s = fixture_structure(name, field)
    dc = fixture_dy(name, field)
    rng = random.Random(seed)
    n3 = dc.total().dim(3)
    for d in first_order_deformations(s, dc):
        x = [rng.randint(-3, 3) for _ in range(n3)]
        moved = perturb(d, x)
        assert verify_deformed_pentagon(s, moved).ok
        cert = deformation_equivalent(s, moved, d)
        assert cert
        lhs = dc.d_tot(3).apply(cert.preimage)
        assert lhs == [dc.field.sub(a, b) for a, b in zip(moved.coords, d.coords)]


def test_distinct_classes_inequivalent():
    # cyclic-group-3 over F3 has a one-dimensional HDY^4; use multiples of the class
    _, s = fixture_structure("cyclic-group-3", "F3")
    dc = fixture_dy("cyclic-group-3", "F3")
    (d,) = first_order_deformations(s, dc)
    fld = dc.field
    twice = deformation_from_cocycle(dc, [fld.add(x, x) for x in d.coords])
    zero = deformation_from_cocycle(dc, [0] * len(d.coords))
    assert not deformation_equivalent(s, d, twice)
    assert not deformation_equivalent(s, d, zero)
    assert deformation_equivalent(s, d, d).preimage == [fld.zero] * dc.total().dim(3)


def test_deformations_from_different_complexes():
    _, s = fixture_structure("kronecker-p1", "Q")
    d1 = first_order_deformations(s, fixture_dy("kronecker-p1", "Q"))[0]
    d2 = first_order_deformations(s, build_dy(s))[0]
    with pytest.raises(ValueError):
        deformation_equivalent(s, d1, d2)


def test_inconsistent_structure_rejected():
    """Scaling the associator breaks the pentagon; the complex then fails d_h^2."""
    _, s = make_cyclic_group(2, QQ)
    bad = PseudoTensorStructure(s.gamma, s.unit, s.alpha.scale(2), s.ell, s.r, s.sym, engine=s.engine)
    with pytest.raises(ComplexError, match="d_h\\^2"):
        build_dy(bad)


def test_hdy_rank_formula():
    dc = fixture_dy("kronecker-p1", "Q")
    tot = dc.total()
    for k in range(5):
        expect = tot.dim(k) - rank(tot.d(k)) - (rank(tot.d(k - 1)) if k else 0)
        assert hdy(dc, k).dim == expect
