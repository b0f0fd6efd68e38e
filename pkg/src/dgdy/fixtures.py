"""Built-in algebras and pseudo tensor structures.

Every fixture here is a "weighted polynomial" model: each basis element
carries idempotent weights (one per slot plus the right weight) and a
monomial in a fixed set of variables, or the special class ``xi``.
Actions multiply monomials and move weights; structure maps are the
unique isomorphisms compatible with *evaluation*, which multiplies out
all the atoms of a tree-module element.  Associativity and commutativity
of polynomial multiplication make the resulting structures strict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .dgcore import DgAlgebra, Leaf, Morphism, NFoldBimodule, Node, TensorSign, TreeEngine
from .dgcore.bimodule import RIGHT
from .errors import ValidationError
from .exactfield import QQ, Field, Matrix, field_from_name, rank, solve
from .structure import (
    ASSOC_SRC,
    ASSOC_TGT,
    LUNIT_SRC,
    RUNIT_SRC,
    SYM_SRC,
    SYM_TGT,
    UNIT_TGT,
    PseudoTensorStructure,
)

FIXTURE_NAMES = ("trivial-point", "product-field", "kronecker-p1", "cyclic-group-n", "symmetric-3")


@dataclass(frozen=True)
class Elem:
    """A weighted monomial: ``weights = (right, slot_1, ..., slot_n)``."""

    degree: int
    weights: tuple
    exps: tuple = ()
    xi: bool = False


@dataclass(frozen=True)
class AlgElem:
    """Algebra basis element in ``e_src A e_tgt`` with a monomial."""

    name: str
    src: object
    tgt: object
    exps: tuple = ()


def _add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return tuple(x + y for x, y in zip(a, b))


def weighted_algebra(field: Field, elems: Sequence[AlgElem]) -> DgAlgebra:
    """Degree-0 algebra whose product multiplies monomials along weights."""
    index = {(e.src, e.tgt, e.exps): e.name for e in elems}
    mult = {}
    for a in elems:
        for b in elems:
            if a.tgt != b.src:
                continue
            prod = index.get((a.src, b.tgt, _add(a.exps, b.exps)))
            if prod is not None:
                mult[(a.name, b.name)] = {prod: 1}
    idems = [e.name for e in elems if e.src == e.tgt and not any(e.exps)]
    A = DgAlgebra(field, [e.name for e in elems], [0] * len(elems), mult, {n: 1 for n in idems})
    A.descr = list(elems)
    return A


def weighted_module(A: DgAlgebra, n_left: int, elems: Sequence[Elem], name: str) -> NFoldBimodule:
    """Module spanned by weighted monomials; ``xi`` elements are killed by
    every non-idempotent algebra element."""
    fld = A.field
    by_deg: dict[int, list[Elem]] = {}
    for e in elems:
        by_deg.setdefault(e.degree, []).append(e)
    pos = {}
    for deg, lst in by_deg.items():
        for j, e in enumerate(lst):
            pos[(e.degree, e.weights, e.exps, e.xi)] = j
    m = NFoldBimodule(A, n_left, {d: len(v) for d, v in by_deg.items()}, name=name)
    one = fld.one
    for deg, lst in by_deg.items():
        m._cols[("d", deg)] = [dict() for _ in lst]
        for ai, a in enumerate(A.descr):
            const = not any(a.exps)
            for slot in range(n_left + 1):
                cols = []
                for e in lst:
                    w = list(e.weights)
                    if slot == RIGHT:
                        ok = w[0] == a.src
                        w[0] = a.tgt
                    else:
                        ok = w[slot] == a.tgt
                        w[slot] = a.src
                    if not ok or (e.xi and not const):
                        cols.append({})
                        continue
                    key = (deg, tuple(w), _add(e.exps, a.exps), e.xi)
                    j = pos.get(key)
                    cols.append({j: one} if j is not None else {})
                m._cols[(slot, deg, ai)] = cols
    m.descr = {(deg, j): e for deg, lst in by_deg.items() for j, e in enumerate(lst)}
    return m


def identity_descr(A: DgAlgebra, m: NFoldBimodule):
    """Attach evaluation data to an identity bimodule over a weighted algebra."""
    m.descr = {}
    for i, a in enumerate(A.descr):
        m.descr[m.algebra_position[i]] = Elem(0, (a.tgt, a.src), a.exps)
    return m


def evaluate(engine: TreeEngine, tree, atoms: tuple):
    """Multiply out a flat tuple; returns a model key or ``None`` for zero."""
    leafw = {}
    it = iter(range(len(atoms)))
    descs = []

    def walk(t):
        for c in t.children:
            if isinstance(c, Node):
                walk(c)
        p = next(it)
        mod = engine.labels[t.label]
        e = mod.descr[atoms[p]]
        for s, c in enumerate(t.children, start=1):
            if isinstance(c, Leaf):
                leafw[c.var] = e.weights[s]
        descs.append(e)
        return e

    root = walk(tree)
    nvars = max((len(e.exps) for e in descs), default=0)
    exps = tuple([0] * nvars)
    xis = 0
    for e in descs:
        if e.exps:
            exps = _add(exps, e.exps)
        xis += e.xi
    if xis > 1 or (xis == 1 and any(exps)):
        return None
    deg = sum(a[0] for a in atoms)
    return (deg, tuple(sorted(leafw.items())), root.weights[0], exps, bool(xis))


def model_iso(engine: TreeEngine, src_tree, tgt_tree) -> Morphism:
    """The degree-0 map ``M(src) -> M(tgt)`` commuting with evaluation."""
    from .dgcore.tensor import slot_perm

    fld = engine.field
    src, tgt = engine.module(src_tree), engine.module(tgt_tree)
    blocks = {}
    for deg in sorted(set(src.degrees()) | set(tgt.degrees())):
        ns, nt = src.dim(deg), tgt.dim(deg)
        if not ns:
            continue
        keys: dict = {}
        scols, tcols = [], []
        for j in range(ns):
            k = evaluate(engine, src_tree, src.flat(deg, j))
            scols.append({keys.setdefault(k, len(keys)): fld.one} if k is not None else {})
        for j in range(nt):
            k = evaluate(engine, tgt_tree, tgt.flat(deg, j))
            tcols.append({keys.setdefault(k, len(keys)): fld.one} if k is not None else {})
        n = len(keys)
        E_t = Matrix.from_columns(fld, n, [[c.get(i, fld.zero) for i in range(n)] for c in tcols])
        E_s = Matrix.from_columns(fld, n, [[c.get(i, fld.zero) for i in range(n)] for c in scols])
        if nt and rank(E_t) != nt:
            raise ValidationError(f"evaluation of {tgt_tree} is not injective in degree {deg}")
        x = solve(E_t, E_s) if nt else None
        if x is None:
            if E_s.is_zero():
                continue
            raise ValidationError(f"evaluation of {src_tree} does not factor through {tgt_tree} in degree {deg}")
        blocks[deg] = x
    return Morphism(src, tgt, 0, blocks, slot_perm(src_tree, tgt_tree))


def weighted_structure(A: DgAlgebra, gamma: NFoldBimodule, unit: NFoldBimodule, *,
                       sign: TensorSign = TensorSign.SWAP, name: str = "structure") -> PseudoTensorStructure:
    """Strict structure whose maps are the evaluation-compatible isomorphisms."""
    eng = TreeEngine(A, {"G": gamma, "U": unit}, sign)
    identity_descr(A, eng.labels["I"])
    alpha = model_iso(eng, ASSOC_SRC, ASSOC_TGT)
    ell = model_iso(eng, LUNIT_SRC, UNIT_TGT)
    r = model_iso(eng, RUNIT_SRC, UNIT_TGT)
    sym = model_iso(eng, SYM_SRC, SYM_TGT)
    return PseudoTensorStructure(gamma, unit, alpha, ell, r, sym, engine=eng, sign=sign, name=name)


def _field(field) -> Field:
    if field is None:
        return QQ
    return field_from_name(field) if isinstance(field, str) else field


# -- the fixtures ------------------------------------------------------------------

def make_trivial(field=None, sign: TensorSign = TensorSign.SWAP):
    """``A = k``, ``G = k``, ``U = k``; every structure map is the identity."""
    fld = _field(field)
    A = weighted_algebra(fld, [AlgElem("1", 0, 0)])
    gamma = weighted_module(A, 2, [Elem(0, (0, 0, 0))], "G")
    unit = weighted_module(A, 0, [Elem(0, (0,))], "U")
    return A, weighted_structure(A, gamma, unit, sign=sign, name="trivial-point")


def make_product_field(field=None, sign: TensorSign = TensorSign.SWAP):
    """``A = k x k`` with ``G = A`` (all three actions componentwise) and ``U = A``."""
    fld = _field(field)
    A = weighted_algebra(fld, [AlgElem("e0", 0, 0), AlgElem("e1", 1, 1)])
    gamma = weighted_module(A, 2, [Elem(0, (i, i, i)) for i in (0, 1)], "G")
    unit = weighted_module(A, 0, [Elem(0, (i,)) for i in (0, 1)], "U")
    return A, weighted_structure(A, gamma, unit, sign=sign, name="product-field")


def binary_monomials(d: int) -> list[tuple[int, int]]:
    """Monomials ``u^a v^b`` with ``a + b = d`` in lexicographic order (``u > v``)."""
    if d < 0:
        return []
    return [(d - b, b) for b in range(d + 1)]


def kronecker_algebra(field=None) -> DgAlgebra:
    """Paths of the 2-Kronecker quiver: ``e0, e1`` and arrows ``x, y`` in ``e0 A e1``."""
    fld = _field(field)
    return weighted_algebra(fld, [AlgElem("e0", 0, 0, (0, 0)), AlgElem("e1", 1, 1, (0, 0)),
                                  AlgElem("x", 0, 1, (1, 0)), AlgElem("y", 0, 1, (0, 1))])


def make_kronecker_p1(field=None, xi_degree: int = -1, sign: TensorSign = TensorSign.SWAP):
    """The projective line through the exceptional pair ``O, O(1)``.

    ``A = End(O + O(1))`` is the Kronecker algebra.  ``G(i, j; l)`` is the
    cohomology of ``O(l - i - j)``: binary forms of degree ``l - i - j`` in
    degree 0, plus one class ``xi`` for ``O(-2)`` (``i = j = 1``, ``l = 0``)
    placed in degree ``xi_degree``.  The unit is ``e0 A``.
    """
    A = kronecker_algebra(field)
    elems = []
    for i, j, l in itertools.product((0, 1), repeat=3):
        for mono in binary_monomials(l - i - j):
            elems.append(Elem(0, (l, i, j), mono))
    elems.append(Elem(xi_degree, (0, 1, 1), (0, 0), xi=True))
    gamma = weighted_module(A, 2, elems, "G")
    unit = weighted_module(A, 0, [Elem(0, (l,), mono) for l in (0, 1) for mono in binary_monomials(l)], "U")
    return A, weighted_structure(A, gamma, unit, sign=sign, name="kronecker-p1")


def cyclic_group(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def make_cyclic_group(n: int, field=None, sign: TensorSign = TensorSign.SWAP):
    """Graded vector spaces over ``Z/n``: ``A = k^G`` and ``G(g, h; g + h) = k``."""
    fld = _field(field)
    A = weighted_algebra(fld, [AlgElem(f"e{g}", g, g) for g in range(n)])
    gamma = weighted_module(A, 2, [Elem(0, ((a + b) % n, a, b)) for a in range(n) for b in range(n)], "G")
    unit = weighted_module(A, 0, [Elem(0, (0,))], "U")
    return A, weighted_structure(A, gamma, unit, sign=sign, name=f"cyclic-group-{n}")


def make_fixture(name: str, field=None, **options):
    """Build a fixture by name; ``cyclic-group-n`` takes the order from the name
    or ``n=``.  ``symmetric-3`` is a classical (pointed) fixture only."""
    sign = TensorSign(options.get("sign", TensorSign.SWAP))
    if name in ("trivial", "trivial-point"):
        return make_trivial(field, sign)
    if name == "product-field":
        return make_product_field(field, sign)
    if name in ("kronecker-p1", "p1"):
        return make_kronecker_p1(field, **options)
    if name.startswith("cyclic-group"):
        tail = name[len("cyclic-group"):].lstrip("-")
        n = options.get("n") or (int(tail) if tail.isdigit() else 2)
        return make_cyclic_group(n, field, sign)
    if name in ("symmetric-3", "s3"):
        raise ValidationError("symmetric-3 has no symmetric pseudo tensor structure; use it with the classical calculator")
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")


def p1_section_dims(n: int) -> int:
    """``dim H^0(P^1, O(n))``, counted independently as monomials in two variables."""
    return sum(1 for a in range(n + 1) for b in range(n + 1) if a + b == n)
