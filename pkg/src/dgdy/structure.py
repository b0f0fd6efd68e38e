"""Pseudo dg-tensor structures, their coherence axioms and tensor functors.

A structure on a dg-algebra ``A`` is a 2-fold bimodule ``G`` (the tensor
product), a right module ``U`` (the unit) and structure maps between tree
modules, all written with the tree notation of :mod:`dgdy.dgcore.tensor`:

* ``alpha: G(G(x0, x1), x2) -> G(x0, G(x1, x2))``
* ``ell: G(U, x0) -> I(x0)`` and ``r: G(x0, U) -> I(x0)``
* ``sym: G(x0, x1) -> G(x1, x0)``

together with degree -1 witnesses for the pentagon (``eta``), the unit
triangle (``mu``), unit symmetry (``kappa``) and the hexagon (``lam``).
``I`` is the identity bimodule.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .dgcore import (
    BimoduleMorphismSpace,
    Leaf,
    Morphism,
    NFoldBimodule,
    Node,
    TensorSign,
    TreeEngine,
    ValidationReport,
    idempotent_contract,
    leaves,
    validate_bimodule,
)
from .dgcore.tensor import slot_perm
from .errors import DEFAULT_UNKNOWN_CAP, PaddingError, ValidationError
from .exactfield import Matrix, kernel_basis, rank, solve


class Mode(enum.Enum):
    """How the chosen inverse of the associator is trusted.

    ``STRICT``: ``alpha_inv`` is a literal two-sided inverse and padding
    carries no sign.  ``HOMOTOPY``: ``alpha_inv`` is an inverse up to
    coboundaries and every padded term carries the sign of the minimal
    number of associators needed to reach it.
    """

    STRICT = "strict"
    HOMOTOPY = "homotopy"


class AxiomStatus(enum.Enum):
    ZERO = "zero"
    EXACT = "exact"
    EXACT_WRONG_WITNESS = "exact-wrong-witness"
    FAIL = "fail"


# -- standard trees ------------------------------------------------------------

X = tuple(Leaf(i) for i in range(16))
UNIT = Node("U")


def g(a, b, label: str = "G") -> Node:
    return Node(label, (a, b))


def ident(a) -> Node:
    return Node("I", (a,))


ASSOC_SRC = g(g(X[0], X[1]), X[2])
ASSOC_TGT = g(X[0], g(X[1], X[2]))
LUNIT_SRC = g(UNIT, X[0])
RUNIT_SRC = g(X[0], UNIT)
UNIT_TGT = ident(X[0])
SYM_SRC = g(X[0], X[1])
SYM_TGT = g(X[1], X[0])
PENTAGON_SRC = g(g(g(X[0], X[1]), X[2]), X[3])
PENTAGON_TGT = g(X[0], g(X[1], g(X[2], X[3])))
TRIANGLE_SRC = g(g(X[0], UNIT), X[1])
HEXAGON_SRC = ASSOC_SRC
HEXAGON_TGT = g(X[1], g(X[2], X[0]))

# source and target trees of each named structure map
MAP_TREES = {
    "alpha": (ASSOC_SRC, ASSOC_TGT),
    "alpha_inv": (ASSOC_TGT, ASSOC_SRC),
    "ell": (LUNIT_SRC, UNIT_TGT),
    "r": (RUNIT_SRC, UNIT_TGT),
    "sym": (SYM_SRC, SYM_TGT),
    "eta": (PENTAGON_SRC, PENTAGON_TGT),
    "mu": (TRIANGLE_SRC, SYM_SRC),
    "kappa": (RUNIT_SRC, UNIT_TGT),
    "lam": (HEXAGON_SRC, HEXAGON_TGT),
}


def left_comb(n: int, label: str = "G", unit: str = "U"):
    """Full left parenthesization with ``n + 1`` leaves (``n >= 1``); ``I(x0)``
    for ``n = 0``, the unit for ``n = -1``, ``None`` below."""
    if n <= -2:
        return None
    if n == -1:
        return Node(unit)
    if n == 0:
        return ident(X[0])
    t = X[0]
    for i in range(1, n + 1):
        t = g(t, X[i], label)
    return t


def right_comb(n: int, label: str = "G", unit: str = "U", first: int = 0):
    if n <= -2:
        return None
    if n == -1:
        return Node(unit)
    if n == 0:
        return ident(X[first])
    t = X[first + n]
    for i in range(first + n - 1, first - 1, -1):
        t = g(X[i], t, label)
    return t


def rename(t, mapping: Mapping[str, str]):
    if isinstance(t, Leaf):
        return t
    return Node(mapping.get(t.label, t.label), tuple(rename(c, mapping) for c in t.children))


def _skeleton(t, label: str = "G"):
    """Binary tree of ``label`` nodes left after dropping identities and units."""
    if isinstance(t, Leaf):
        return t
    kids = [_skeleton(c, label) for c in t.children]
    kids = [k for k in kids if k is not None]
    if t.label != label:
        if len(kids) > 1:
            raise ValueError(f"cannot take the skeleton through {t.label}")
        return kids[0] if kids else None
    if len(kids) == 1:
        return kids[0]
    if not kids:
        return None
    return Node(label, tuple(kids))


def _rotations(t):
    if isinstance(t, Leaf) or t is None:
        return
    a, b = t.children
    if isinstance(a, Node):
        yield Node(t.label, (a.children[0], Node(t.label, (a.children[1], b))))
    if isinstance(b, Node):
        yield Node(t.label, (Node(t.label, (a, b.children[0])), b.children[1]))
    for i, c in enumerate(t.children):
        for r in _rotations(c):
            kids = list(t.children)
            kids[i] = r
            yield Node(t.label, tuple(kids))


@lru_cache(maxsize=None)
def rotation_distance(s, t) -> int:
    """Minimal number of associators relating two binary trees on the same leaves."""
    s, t = _skeleton(s), _skeleton(t)
    if s == t:
        return 0
    if s is None or t is None or leaves(s) != leaves(t):
        raise ValueError(f"{s} and {t} are not parenthesizations of the same word")
    seen = {s: 0}
    queue = deque([s])
    while queue:
        cur = queue.popleft()
        for nxt in _rotations(cur):
            if nxt not in seen:
                seen[nxt] = seen[cur] + 1
                if nxt == t:
                    return seen[nxt]
                queue.append(nxt)
    raise ValueError("trees are not connected by rotations")


# -- results -------------------------------------------------------------------

@dataclass
class AxiomResult:
    axiom: str
    status: AxiomStatus
    residual: Morphism | None = None
    detail: str = ""
    preimage: Morphism | None = None

    @property
    def ok(self) -> bool:
        return self.status in (AxiomStatus.ZERO, AxiomStatus.EXACT)

    def __str__(self):
        s = f"{self.axiom}: {self.status.value}"
        return f"{s} ({self.detail})" if self.detail else s


@dataclass
class AxiomReport:
    results: dict[str, AxiomResult] = field(default_factory=dict)

    def add(self, r: AxiomResult):
        self.results[r.axiom] = r

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    def status(self, axiom: str) -> AxiomStatus:
        return self.results[axiom].status

    def __getitem__(self, axiom: str) -> AxiomResult:
        return self.results[axiom]

    def __str__(self):
        return "\n".join(str(r) for r in self.results.values())


def _nonzero_pattern(f: Morphism, limit: int = 6) -> str:
    entries = []
    for s, blk in sorted(f.cols.items()):
        for j, col in enumerate(blk):
            for i in sorted(col):
                entries.append(f"deg {s}: ({i},{j})")
    more = f" and {len(entries) - limit} more" if len(entries) > limit else ""
    return "nonzero at " + ", ".join(entries[:limit]) + more


def coboundary_preimage(space: BimoduleMorphismSpace, f: Morphism) -> Morphism | None:
    """Some ``h`` with ``D(h) = f``, or ``None`` if ``f`` is not exact."""
    k = f.degree
    if f.is_zero():
        return space.zero(k - 1)
    try:
        coords = space.coordinates(f)
    except ValueError:
        return None
    d = space.differential(k - 1)
    fld = space.field
    if d.cols == 0:
        return None
    x = solve(d, Matrix.from_columns(fld, len(coords), [coords]))
    if x is None:
        return None
    return space.from_coordinates(k - 1, x.column(0))


def classify(axiom: str, space: BimoduleMorphismSpace, residual: Morphism,
             witness: Morphism | None) -> AxiomResult:
    """Compare a degree-0 residual with the differential of its witness."""
    if witness is not None:
        if residual == witness.differential():
            status = AxiomStatus.ZERO if residual.is_zero() else AxiomStatus.EXACT
            return AxiomResult(axiom, status, residual)
    elif residual.is_zero():
        return AxiomResult(axiom, AxiomStatus.ZERO, residual)
    pre = coboundary_preimage(space, residual)
    if pre is not None:
        why = "witness missing" if witness is None else "witness does not match"
        return AxiomResult(axiom, AxiomStatus.EXACT_WRONG_WITNESS, residual, why, pre)
    return AxiomResult(axiom, AxiomStatus.FAIL, residual, _nonzero_pattern(residual))


# -- structures ----------------------------------------------------------------

class PseudoTensorStructure:
    """The data ``(G, U, alpha, ell, r, sym)`` with witnesses and a chosen
    inverse of ``alpha``.

    Structure maps may be given as :class:`Morphism` objects over any
    engine with the same labelled modules, or as ``{degree: Matrix}``
    dictionaries in the bases of the standard trees.  ``alpha_inv`` defaults
    to the literal inverse in ``STRICT`` mode.
    """

    def __init__(self, gamma: NFoldBimodule, unit: NFoldBimodule, alpha, ell, r, sym, *,
                 alpha_inv=None, eta=None, mu=None, kappa=None, lam=None,
                 mode: Mode = Mode.STRICT, sign: TensorSign = TensorSign.SWAP,
                 engine: TreeEngine | None = None, cap: int = DEFAULT_UNKNOWN_CAP,
                 check: bool = True, name: str = "structure"):
        if gamma.n_left != 2:
            raise ValidationError(f"the tensor bimodule must be 2-fold, got n_left={gamma.n_left}")
        if unit.n_left != 0:
            raise ValidationError(f"the unit must be a right module, got n_left={unit.n_left}")
        if unit.algebra is not gamma.algebra:
            raise ValidationError("unit and tensor bimodule live over different algebras")
        self.algebra = gamma.algebra
        self.field = gamma.field
        self.gamma = gamma
        self.unit = unit
        self.mode = mode
        self.sign = sign
        self.cap = cap
        self.name = name
        if engine is None:
            engine = TreeEngine(self.algebra, {"G": gamma, "U": unit}, sign)
        elif engine.labels.get("G") is not gamma or engine.labels.get("U") is not unit:
            raise ValueError("engine labels G and U must be the given modules")
        self.engine = engine
        self._spaces: dict = {}
        self._paths: dict = {}
        self.alpha = self.morphism(alpha, ASSOC_SRC, ASSOC_TGT, 0)
        self.ell = self.morphism(ell, LUNIT_SRC, UNIT_TGT, 0)
        self.r = self.morphism(r, RUNIT_SRC, UNIT_TGT, 0)
        self.sym = self.morphism(sym, SYM_SRC, SYM_TGT, 0)
        if alpha_inv is None:
            if mode is Mode.HOMOTOPY:
                raise ValidationError("HOMOTOPY mode needs an explicit alpha_inv")
            if not self.alpha.is_invertible():
                raise ValidationError("alpha is not invertible; supply alpha_inv in HOMOTOPY mode")
            self.alpha_inv = self.alpha.inverse()
        else:
            self.alpha_inv = self.morphism(alpha_inv, ASSOC_TGT, ASSOC_SRC, 0)
        self.eta = self.morphism(eta, PENTAGON_SRC, PENTAGON_TGT, -1)
        self.mu = self.morphism(mu, TRIANGLE_SRC, SYM_SRC, -1)
        self.kappa = self.morphism(kappa, RUNIT_SRC, UNIT_TGT, -1)
        self.lam = self.morphism(lam, HEXAGON_SRC, HEXAGON_TGT, -1)
        self._inverses: dict[str, Morphism] = {}
        if check:
            report = validate_structure(self)
            if not report.ok:
                raise ValidationError(f"invalid pseudo tensor structure:\n{report}", report)

    # -- plumbing -------------------------------------------------------------
    def module(self, tree) -> NFoldBimodule:
        return self.engine.module(tree)

    def hom(self, src_tree, tgt_tree) -> BimoduleMorphismSpace:
        key = (src_tree, tgt_tree)
        sp = self._spaces.get(key)
        if sp is None:
            sp = BimoduleMorphismSpace(self.module(src_tree), self.module(tgt_tree),
                                       slot_perm(src_tree, tgt_tree), cap=self.cap,
                                       label=f"Hom({src_tree}, {tgt_tree})")
            self._spaces[key] = sp
        return sp

    def morphism(self, f, src_tree, tgt_tree, degree: int) -> Morphism | None:
        """Bring ``f`` onto this structure's modules (``None`` stays ``None``)."""
        if f is None:
            return None
        src, tgt = self.module(src_tree), self.module(tgt_tree)
        perm = slot_perm(src_tree, tgt_tree)
        if isinstance(f, Morphism):
            if f.source is src and f.target is tgt:
                return f
            if f.source.dims != src.dims or f.target.dims != tgt.dims:
                raise ValidationError(f"map {src_tree} -> {tgt_tree} has the wrong dimensions")
            return Morphism(src, tgt, f.degree, f.cols, perm)
        return Morphism(src, tgt, degree, dict(f), perm)

    def zero(self, src_tree, tgt_tree, degree: int) -> Morphism:
        return Morphism(self.module(src_tree), self.module(tgt_tree), degree, {}, slot_perm(src_tree, tgt_tree))

    def apply(self, f: Morphism, pattern_src, pattern_tgt, tree, addr=()):
        return self.engine.apply_at(f, pattern_src, pattern_tgt, tree, addr)

    def _inverse_of(self, name: str, f: Morphism) -> Morphism:
        inv = self._inverses.get(name)
        if inv is None:
            if not f.is_invertible():
                raise PaddingError(f"{name} is not invertible, cannot pad through it")
            inv = f.inverse()
            self._inverses[name] = inv
        return inv

    # -- normalization ----------------------------------------------------------
    def _next_step(self, t, addr=()):
        """The first rewriting step towards the right-normal form, or ``None``."""
        if isinstance(t, Leaf):
            return None
        if t.label == "G":
            a, b = t.children
            if a == UNIT:
                return ("ell", addr)
            if b == UNIT:
                return ("r", addr)
        if t.label == "I":
            child = t.children[0]
            if addr or isinstance(child, Node):
                return ("id", addr)
        for i, c in enumerate(t.children):
            step = self._next_step(c, addr + (i,))
            if step is not None:
                return step
        return None

    def _next_rotation(self, t, addr=()):
        if isinstance(t, Leaf):
            return None
        if t.label == "G" and isinstance(t.children[0], Node) and t.children[0].label == "G":
            return addr
        for i, c in enumerate(t.children):
            a = self._next_rotation(c, addr + (i,))
            if a is not None:
                return a
        return None

    def path(self, tree):
        """Canonical isomorphism from ``tree`` to its right-normal form.

        Units are removed with ``ell``/``r``, identity nodes are contracted
        and associators are applied at the first node (in preorder) whose
        left child is a product.  Returns ``(normal_tree, morphism, steps)``.
        """
        hit = self._paths.get(tree)
        if hit is not None:
            return hit
        steps = []
        cur = tree
        total = None
        while True:
            step = self._next_step(cur)
            if step is None:
                a = self._next_rotation(cur)
                if a is None:
                    break
                step = ("alpha", a)
            kind, addr = step
            if kind == "ell":
                nxt, f = self.apply(self.ell, LUNIT_SRC, UNIT_TGT, cur, addr)
            elif kind == "r":
                nxt, f = self.apply(self.r, RUNIT_SRC, UNIT_TGT, cur, addr)
            elif kind == "id":
                nxt, f = self.engine.remove_identity(cur, addr)
            else:
                nxt, f = self.apply(self.alpha, ASSOC_SRC, ASSOC_TGT, cur, addr)
            steps.append((kind, addr, cur))
            total = f if total is None else f @ total
            cur = nxt
        if total is None:
            total = Morphism.identity(self.module(tree))
        out = (cur, total, tuple(steps))
        self._paths[tree] = out
        return out

    def path_inverse(self, tree):
        """Map from the right-normal form back to ``tree`` built from the
        chosen inverses (``alpha_inv`` for associators)."""
        key = ("inv", tree)
        hit = self._paths.get(key)
        if hit is not None:
            return hit
        normal, _, steps = self.path(tree)
        total = None
        for kind, addr, before in reversed(steps):
            if kind == "alpha":
                after, _ = self.apply(self.alpha, ASSOC_SRC, ASSOC_TGT, before, addr)
                _, f = self.apply(self.alpha_inv, ASSOC_TGT, ASSOC_SRC, after, addr)
            elif kind == "ell":
                after, _ = self.apply(self.ell, LUNIT_SRC, UNIT_TGT, before, addr)
                _, f = self.apply(self._inverse_of("ell", self.ell), UNIT_TGT, LUNIT_SRC, after, addr)
            elif kind == "r":
                after, _ = self.apply(self.r, RUNIT_SRC, UNIT_TGT, before, addr)
                _, f = self.apply(self._inverse_of("r", self.r), UNIT_TGT, RUNIT_SRC, after, addr)
            else:
                after, rem = self.engine.remove_identity(before, addr)
                f = rem.inverse()
            total = f if total is None else f @ total
        if total is None:
            total = Morphism.identity(self.module(tree))
        out = (normal, total)
        self._paths[key] = out
        return out

    def pad(self, f: Morphism, src_tree, tgt_tree, left_tree):
        """``f: M(src) -> M(tgt)`` turned into ``M(left) -> M(right normal)``.

        Returns ``(morphism, sign)``; the sign is already applied to the
        morphism and is ``+1`` in ``STRICT`` mode.
        """
        normal, to_right, _ = self.path(tgt_tree)
        _, from_right = self.path_inverse(src_tree)
        lnormal, lpath, _ = self.path(left_tree)
        if lnormal != self.path(src_tree)[0] or normal != lnormal:
            raise PaddingError(f"{src_tree}, {tgt_tree} and {left_tree} have different normal forms")
        out = to_right @ f @ from_right @ lpath
        sgn = 1
        if self.mode is Mode.HOMOTOPY:
            n = rotation_distance(left_tree, src_tree) + rotation_distance(tgt_tree, normal)
            if n % 2:
                sgn = -1
                out = -out
        return out, sgn

    def padding_sign(self, src_tree, tgt_tree, left_tree) -> int:
        """Number of associators counted by the padding sign rule."""
        normal = self.path(tgt_tree)[0]
        return rotation_distance(left_tree, src_tree) + rotation_distance(tgt_tree, normal)

    def __repr__(self):
        return f"PseudoTensorStructure({self.name}, dim G={self.gamma.total_dim}, dim U={self.unit.total_dim}, {self.mode.value})"


def validate_structure(s: PseudoTensorStructure) -> ValidationReport:
    """Equivariance, grading, cycle conditions and inverse data."""
    rep = ValidationReport()
    rep.extend(validate_bimodule(s.gamma))
    rep.extend(validate_bimodule(s.unit))
    maps = [("alpha", s.alpha, 0), ("alpha_inv", s.alpha_inv, 0), ("ell", s.ell, 0), ("r", s.r, 0),
            ("sym", s.sym, 0), ("eta", s.eta, -1), ("mu", s.mu, -1), ("kappa", s.kappa, -1),
            ("lam", s.lam, -1)]
    for name, f, deg in maps:
        if f is None:
            continue
        if f.degree != deg:
            rep.add("grading", (name,), f"degree {f.degree}, expected {deg}")
            continue
        bad = f.equivariance_defects(limit=3)
        if bad:
            rep.add("equivariance", (name,) + bad[0], f"{len(bad)}+ defects")
        if deg == 0 and not f.differential().is_zero():
            rep.add("cycle", (name,), "degree-0 structure map is not a cycle")
    if not rep.ok:
        return rep
    for name, comp, tree in (("alpha_inv o alpha", s.alpha_inv @ s.alpha, ASSOC_SRC),
                             ("alpha o alpha_inv", s.alpha @ s.alpha_inv, ASSOC_TGT)):
        resid = comp - Morphism.identity(s.module(tree))
        if resid.is_zero():
            continue
        if s.mode is Mode.STRICT:
            rep.add("inverse", (name,), "alpha_inv is not a literal inverse in STRICT mode")
        elif coboundary_preimage(s.hom(tree, tree), resid) is None:
            rep.add("inverse", (name,), "not the identity up to a coboundary")
    return rep


def coherence_check(s: PseudoTensorStructure) -> AxiomReport:
    """Evaluate the pentagon, unit, symmetry, unit-symmetry and hexagon axioms."""
    rep = AxiomReport()
    ap = s.apply
    a = s.alpha
    # pentagon: alpha o alpha - (Id x alpha) o alpha o (alpha x Id)
    t1, f1 = ap(a, ASSOC_SRC, ASSOC_TGT, PENTAGON_SRC, ())
    t2, f2 = ap(a, ASSOC_SRC, ASSOC_TGT, t1, ())
    lhs = f2 @ f1
    u1, h1 = ap(a, ASSOC_SRC, ASSOC_TGT, PENTAGON_SRC, (0,))
    u2, h2 = ap(a, ASSOC_SRC, ASSOC_TGT, u1, ())
    u3, h3 = ap(a, ASSOC_SRC, ASSOC_TGT, u2, (1,))
    assert t2 == u3 == PENTAGON_TGT
    rep.add(classify("pentagon", s.hom(PENTAGON_SRC, PENTAGON_TGT), lhs - h3 @ h2 @ h1, s.eta))
    # unit triangle: (Id x ell) o alpha - (r x Id), compared in G(x0, x1)
    v1, k1 = ap(a, ASSOC_SRC, ASSOC_TGT, TRIANGLE_SRC, ())
    v2, k2 = ap(s.ell, LUNIT_SRC, UNIT_TGT, v1, (1,))
    v3, k3 = s.engine.remove_identity(v2, (1,))
    w1, m1 = ap(s.r, RUNIT_SRC, UNIT_TGT, TRIANGLE_SRC, (0,))
    w2, m2 = s.engine.remove_identity(w1, (0,))
    assert v3 == w2 == SYM_SRC
    rep.add(classify("unit", s.hom(TRIANGLE_SRC, SYM_SRC), k3 @ k2 @ k1 - m2 @ m1, s.mu))
    # symmetry: c o c - id is a coboundary
    _, c2 = ap(s.sym, SYM_SRC, SYM_TGT, SYM_TGT, ())
    resid = Morphism(s.module(SYM_SRC), s.module(SYM_SRC), 0, (c2 @ s.sym).cols) - Morphism.identity(s.module(SYM_SRC))
    sp = s.hom(SYM_SRC, SYM_SRC)
    if resid.is_zero():
        rep.add(AxiomResult("symmetry", AxiomStatus.ZERO, resid))
    else:
        pre = coboundary_preimage(sp, resid)
        if pre is not None:
            rep.add(AxiomResult("symmetry", AxiomStatus.EXACT, resid, "c o c - id is a coboundary", pre))
        else:
            rep.add(AxiomResult("symmetry", AxiomStatus.FAIL, resid, _nonzero_pattern(resid)))
    # unit symmetry: ell o c - r on G(x0, U)
    y1, n1 = ap(s.sym, SYM_SRC, SYM_TGT, RUNIT_SRC, ())
    y2, n2 = ap(s.ell, LUNIT_SRC, UNIT_TGT, y1, ())
    assert y2 == UNIT_TGT
    rep.add(classify("unit-symmetry", s.hom(RUNIT_SRC, UNIT_TGT), n2 @ n1 - s.r, s.kappa))
    # hexagon: alpha o c o alpha - (Id x c) o alpha o (c x Id)
    z1, p1 = ap(a, ASSOC_SRC, ASSOC_TGT, HEXAGON_SRC, ())
    z2, p2 = ap(s.sym, SYM_SRC, SYM_TGT, z1, ())
    z3, p3 = ap(a, ASSOC_SRC, ASSOC_TGT, z2, ())
    q1, r1 = ap(s.sym, SYM_SRC, SYM_TGT, HEXAGON_SRC, (0,))
    q2, r2 = ap(a, ASSOC_SRC, ASSOC_TGT, q1, ())
    q3, r3 = ap(s.sym, SYM_SRC, SYM_TGT, q2, (1,))
    assert z3 == q3 == HEXAGON_TGT
    rep.add(classify("hexagon", s.hom(HEXAGON_SRC, HEXAGON_TGT), p3 @ p2 @ p1 - r3 @ r2 @ r1, s.lam))
    return rep


def pentagon_composites(s: PseudoTensorStructure, alpha: Morphism | None = None):
    """The two sides ``alpha o alpha`` and ``(Id x alpha) o alpha o (alpha x Id)``."""
    a = s.alpha if alpha is None else alpha
    ap = s.apply
    t1, f1 = ap(a, ASSOC_SRC, ASSOC_TGT, PENTAGON_SRC, ())
    _, f2 = ap(a, ASSOC_SRC, ASSOC_TGT, t1, ())
    u1, h1 = ap(a, ASSOC_SRC, ASSOC_TGT, PENTAGON_SRC, (0,))
    u2, h2 = ap(a, ASSOC_SRC, ASSOC_TGT, u1, ())
    _, h3 = ap(a, ASSOC_SRC, ASSOC_TGT, u2, (1,))
    return (f2, f1), (h3, h2, h1)


def contraction_table(s_or_gamma, idempotents=None) -> dict:
    """Dimensions of ``G`` evaluated on pairs of representables.

    Returns ``{(i, j): {degree: [dim G(e_i A, e_j A) e_l for each l]}}``
    indexed by positions in the idempotent family of the algebra.
    """
    gamma = s_or_gamma.gamma if isinstance(s_or_gamma, PseudoTensorStructure) else s_or_gamma
    A = gamma.algebra
    idems = list(idempotents) if idempotents is not None else A.idempotents()
    if idems is None:
        raise ValueError("the algebra has no complete family of orthogonal idempotents")
    out = {}
    for i, ei in enumerate(idems):
        first = idempotent_contract(gamma, 1, ei)
        for j, ej in enumerate(idems):
            m = idempotent_contract(first, 1, ej)
            row = {}
            for deg in m.degrees():
                row[deg] = [rank(m.right_action(el, deg)) for el in idems]
            out[(i, j)] = row
    return out


def perfectness_report(s: PseudoTensorStructure) -> ValidationReport:
    """Finite, bounded evaluations of ``G`` and ``U`` on representables.

    Everything here is finite-dimensional by construction, so the check
    amounts to confirming each contraction has bounded support and that
    the unit is nonzero.
    """
    rep = ValidationReport()
    if s.unit.total_dim == 0:
        rep.add("perfect", ("U",), "unit module is zero")
    for key, row in contraction_table(s).items():
        for deg, counts in row.items():
            if any(c < 0 for c in counts):
                rep.add("perfect", key, f"degree {deg}")
    return rep


# -- functors ------------------------------------------------------------------

FUNCTOR_U_SRC = UNIT
FUNCTOR_U_TGT = Node("F", (Node("V"),))
FUNCTOR_F_SRC = g(Node("F", (X[0],)), Node("F", (X[1],)))
FUNCTOR_F_TGT = Node("F", (g(X[0], X[1], "L"),))


@dataclass
class FunctorData:
    """A pseudo tensor functor from a structure ``(G, U)`` to ``(L, V)``.

    ``phi`` is a 1-fold bimodule; ``u: U -> F(V)`` and
    ``f: G(F(x0), F(x1)) -> F(L(x0, x1))`` are degree-0 maps over an engine
    from :func:`functor_engine`.  ``w`` (left unit), ``e`` (right unit) and
    ``a`` (associativity) are degree -1 witnesses; ``u_inv``/``f_inv`` are
    optional inverse data certifying invertibility in cohomology.
    """

    phi: NFoldBimodule
    u_map: Morphism
    f_map: Morphism
    w: Morphism | None = None
    e: Morphism | None = None
    a: Morphism | None = None
    u_inv: Morphism | None = None
    f_inv: Morphism | None = None


def functor_engine(src: PseudoTensorStructure, tgt: PseudoTensorStructure, phi: NFoldBimodule,
                   extra: Mapping[str, NFoldBimodule] | None = None) -> TreeEngine:
    """Engine with labels ``G, U`` (source), ``L, V`` (target) and ``F`` (phi)."""
    if src.algebra is not tgt.algebra or phi.algebra is not src.algebra:
        raise ValidationError("functor data must live over a single algebra")
    if phi.n_left != 1:
        raise ValidationError("phi must be a 1-fold bimodule")
    labels = {"G": src.gamma, "U": src.unit, "L": tgt.gamma, "V": tgt.unit, "F": phi}
    labels.update(extra or {})
    return TreeEngine(src.algebra, labels, src.sign)


def _rebase(eng: TreeEngine, f: Morphism | None, src_tree, tgt_tree) -> Morphism | None:
    if f is None:
        return None
    src, tgt = eng.module(src_tree), eng.module(tgt_tree)
    if f.source is src and f.target is tgt:
        return f
    if f.source.dims != src.dims or f.target.dims != tgt.dims:
        raise ValidationError(f"map {src_tree} -> {tgt_tree} has the wrong dimensions")
    return Morphism(src, tgt, f.degree, f.cols, slot_perm(src_tree, tgt_tree))


class _FunctorContext:
    def __init__(self, src: PseudoTensorStructure, tgt: PseudoTensorStructure, fd: FunctorData):
        self.eng = eng = functor_engine(src, tgt, fd.phi)
        self.src, self.tgt = src, tgt
        lt = {"G": "L", "U": "V"}
        self.alpha_s = _rebase(eng, src.alpha, ASSOC_SRC, ASSOC_TGT)
        self.alpha_t = _rebase(eng, tgt.alpha, rename(ASSOC_SRC, lt), rename(ASSOC_TGT, lt))
        self.ell_s = _rebase(eng, src.ell, LUNIT_SRC, UNIT_TGT)
        self.r_s = _rebase(eng, src.r, RUNIT_SRC, UNIT_TGT)
        self.ell_t = _rebase(eng, tgt.ell, rename(LUNIT_SRC, lt), UNIT_TGT)
        self.r_t = _rebase(eng, tgt.r, rename(RUNIT_SRC, lt), UNIT_TGT)
        self.u = _rebase(eng, fd.u_map, FUNCTOR_U_SRC, FUNCTOR_U_TGT)
        self.f = _rebase(eng, fd.f_map, FUNCTOR_F_SRC, FUNCTOR_F_TGT)
        self.fd = fd

    def space(self, s, t):
        return BimoduleMorphismSpace(self.eng.module(s), self.eng.module(t), slot_perm(s, t), cap=self.src.cap)


def functor_check(src: PseudoTensorStructure, tgt: PseudoTensorStructure, fd: FunctorData) -> AxiomReport:
    """Associativity and unit axioms of a pseudo tensor functor, plus
    invertibility of ``u`` and ``f`` in cohomology."""
    ctx = _FunctorContext(src, tgt, fd)
    eng = ctx.eng
    rep = AxiomReport()
    lt = {"G": "L", "U": "V"}
    for name, m, deg in (("u", ctx.u, 0), ("f", ctx.f, 0)):
        bad = m.equivariance_defects(limit=1)
        if bad or m.degree != deg or not m.differential().is_zero():
            raise ValidationError(f"functor map {name} is not an equivariant degree-0 cycle")
    F_P, F_Q = FUNCTOR_F_SRC, FUNCTOR_F_TGT
    ap = eng.apply_at
    # associativity
    src3 = g(g(Node("F", (X[0],)), Node("F", (X[1],))), Node("F", (X[2],)))
    t1, a1 = ap(ctx.f, F_P, F_Q, src3, (0,))
    t2, a2 = ap(ctx.f, F_P, F_Q, t1, ())
    t3, a3 = ap(ctx.alpha_t, rename(ASSOC_SRC, lt), rename(ASSOC_TGT, lt), t2, (0,))
    s1, b1 = ap(ctx.alpha_s, ASSOC_SRC, ASSOC_TGT, src3, ())
    s2, b2 = ap(ctx.f, F_P, F_Q, s1, (1,))
    s3, b3 = ap(ctx.f, F_P, F_Q, s2, ())
    assert t3 == s3
    a_w = _rebase(eng, fd.a, src3, t3)
    rep.add(classify("associativity", ctx.space(src3, t3), a3 @ a2 @ a1 - b3 @ b2 @ b1, a_w))
    # left unit
    srcl = g(UNIT, Node("F", (X[0],)))
    l1, c1 = ap(ctx.ell_s, LUNIT_SRC, UNIT_TGT, srcl, ())
    l2, c2 = eng.remove_identity(l1, ())
    m1, d1 = ap(ctx.u, FUNCTOR_U_SRC, FUNCTOR_U_TGT, srcl, (0,))
    m2, d2 = ap(ctx.f, F_P, F_Q, m1, ())
    m3, d3 = ap(ctx.ell_t, rename(LUNIT_SRC, lt), UNIT_TGT, m2, (0,))
    m4, d4 = eng.remove_identity(m3, (0,))
    assert l2 == m4
    rep.add(classify("left-unit", ctx.space(srcl, l2), d4 @ d3 @ d2 @ d1 - c2 @ c1, _rebase(eng, fd.w, srcl, l2)))
    # right unit
    srcr = g(Node("F", (X[0],)), UNIT)
    l1, c1 = ap(ctx.r_s, RUNIT_SRC, UNIT_TGT, srcr, ())
    l2, c2 = eng.remove_identity(l1, ())
    m1, d1 = ap(ctx.u, FUNCTOR_U_SRC, FUNCTOR_U_TGT, srcr, (1,))
    m2, d2 = ap(ctx.f, F_P, F_Q, m1, ())
    m3, d3 = ap(ctx.r_t, rename(RUNIT_SRC, lt), UNIT_TGT, m2, (0,))
    m4, d4 = eng.remove_identity(m3, (0,))
    assert l2 == m4
    rep.add(classify("right-unit", ctx.space(srcr, l2), d4 @ d3 @ d2 @ d1 - c2 @ c1, _rebase(eng, fd.e, srcr, l2)))
    # invertibility in cohomology
    for name, m, inv, s_tree, t_tree in (("u", ctx.u, fd.u_inv, FUNCTOR_U_SRC, FUNCTOR_U_TGT),
                                         ("f", ctx.f, fd.f_inv, F_P, F_Q)):
        rep.add(_invertibility(ctx, name, m, _rebase(eng, inv, t_tree, s_tree), s_tree, t_tree))
    return rep


def _invertibility(ctx, name, m: Morphism, inv: Morphism | None, s_tree, t_tree) -> AxiomResult:
    axiom = f"{name}-invertible"
    if inv is None:
        if m.is_invertible():
            return AxiomResult(axiom, AxiomStatus.ZERO, None, "literal inverse")
        return AxiomResult(axiom, AxiomStatus.FAIL, None, "no inverse data and not literally invertible")
    worst = AxiomStatus.ZERO
    for comp, tree in ((inv @ m, s_tree), (m @ inv, t_tree)):
        resid = comp - Morphism.identity(ctx.eng.module(tree))
        if resid.is_zero():
            continue
        if coboundary_preimage(ctx.space(tree, tree), resid) is None:
            return AxiomResult(axiom, AxiomStatus.FAIL, resid, _nonzero_pattern(resid))
        worst = AxiomStatus.EXACT
    return AxiomResult(axiom, worst, None, "inverse up to homotopy" if worst is AxiomStatus.EXACT else "")


def identity_functor(s: PseudoTensorStructure) -> FunctorData:
    """The canonical identity functor: ``phi`` is the identity bimodule."""
    phi = s.engine.labels["I"]
    eng = functor_engine(s, s, phi)
    # u: U -> F(V) is the inverse of contracting F
    _, rem = eng.remove_identity(FUNCTOR_U_TGT, ())
    _, to_u = eng.relabel(Node("V"), {"V": "U"})
    u = (to_u @ rem).inverse()
    # f: G(F x0, F x1) -> G(x0, x1) -> L(x0, x1) -> F(L(x0, x1))
    t1, r1 = eng.remove_identity(FUNCTOR_F_SRC, (0,))
    t2, r2 = eng.remove_identity(t1, (1,))
    t3, rl = eng.relabel(t2, {"G": "L"})
    _, back = eng.remove_identity(FUNCTOR_F_TGT, ())
    f = back.inverse() @ rl @ r2 @ r1
    return FunctorData(phi, u, f)


@dataclass
class EquivalenceResult:
    ok: bool
    certificate: Morphism | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def equivalence_check(s1: PseudoTensorStructure, s2: PseudoTensorStructure,
                      fd: FunctorData, fd_inv: FunctorData, *, tries: int = 32, seed: int = 0) -> EquivalenceResult:
    """Check that ``phi (x) phi'`` is isomorphic to the identity bimodule.

    Both functors must pass :func:`functor_check`.  A degree-0 cycle
    ``F(F'(x)) -> I(x)`` that is invertible serves as the certificate; it is
    searched among basis cycles and then deterministic random combinations.
    """
    for label, rep in (("phi", functor_check(s1, s2, fd)), ("phi'", functor_check(s2, s1, fd_inv))):
        if not rep.ok:
            bad = ", ".join(str(r) for r in rep.results.values() if not r.ok)
            return EquivalenceResult(False, None, f"{label} is not a tensor functor: {bad}")
    return invertible_composite(fd.phi, fd_inv.phi, s1.sign, cap=s1.cap, tries=tries, seed=seed)


def invertible_composite(phi: NFoldBimodule, phi_inv: NFoldBimodule, sign: TensorSign = TensorSign.SWAP, *,
                         cap: int = DEFAULT_UNKNOWN_CAP, tries: int = 32, seed: int = 0) -> EquivalenceResult:
    """Look for an isomorphism ``phi (x) phi_inv -> I`` of 1-fold bimodules.

    Candidates are the degree-0 cycles of the Hom complex: basis cycles
    first, then deterministic random combinations of them.
    """
    import random

    A = phi.algebra
    eng = TreeEngine(A, {"F": phi, "H": phi_inv}, sign)
    src_tree = Node("F", (Node("H", (X[0],)),))
    src = eng.module(src_tree)
    tgt = eng.module(UNIT_TGT)
    if src.dims != tgt.dims:
        return EquivalenceResult(False, None, f"dimensions differ: {dict(sorted(src.dims.items()))} vs {dict(sorted(tgt.dims.items()))}")
    sp = BimoduleMorphismSpace(src, tgt, cap=cap)
    fld = A.field
    if sp.dim(0) == 0:
        return EquivalenceResult(False, None, "no equivariant maps to the identity bimodule")
    d0 = sp.differential(0)
    z = kernel_basis(d0) if d0.rows else Matrix.identity(fld, sp.dim(0))
    cycles = [sp.from_coordinates(0, z.column(j)) for j in range(z.cols)]
    for c in cycles:
        if c.is_invertible():
            return EquivalenceResult(True, c, "basis cycle")
    rng = random.Random(seed)
    for _ in range(tries):
        coeffs = [rng.randint(-3, 3) for _ in cycles]
        comb = sp.zero(0)
        for c, x in zip(cycles, coeffs):
            if x:
                comb = comb + c.scale(x)
        if comb.is_invertible():
            return EquivalenceResult(True, comb, "random combination of cycles")
    return EquivalenceResult(False, None, "no invertible degree-0 cycle found")
