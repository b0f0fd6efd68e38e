"""The Davydov-Yetter double complex of a pseudo tensor structure.

Column ``n`` holds the Hom complex from the full left parenthesization
with ``n`` inputs to the full right one, shifted so that bidegree
``(n, m)`` is internal degree ``m - 1``.  The vertical differential is the
Hom differential, the horizontal one is the bar-type alternating sum whose
terms are padded by associator paths.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .complexes import (CochainComplex, CohomologyReport, ComplexError, DoubleComplex, TotalSign,
                        cohomology, components, total_sign, totalize)
from .dgcore import Leaf, Morphism, NFoldBimodule, tensor_bimodules
from .dgcore.bimodule import zero_module
from .dgcore.tensor import replace, substitute, subtree
from .errors import PaddingError, WindowError
from .exactfield import Matrix, solve
from .structure import (Mode, PseudoTensorStructure, X, g, left_comb,
                        pentagon_composites, right_comb)


class Orientation(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Parenthesization:
    """An iterated tensor power of ``G`` with ``arity`` factors.

    ``trace`` lists, for each tensoring step, the slot of the new outer
    factor that received the previous product (1 for the left comb, 2 for
    the right comb).
    """

    arity: int
    orientation: Orientation
    tree: object
    module: NFoldBimodule
    trace: tuple[int, ...] = ()

    @property
    def n_left(self) -> int:
        return self.module.n_left

    def replay(self, s: PseudoTensorStructure) -> NFoldBimodule:
        """Rebuild the module by explicit pairwise tensoring."""
        if self.arity <= 0:
            return self.module
        m = s.gamma
        for slot in self.trace:
            m = tensor_bimodules(s.gamma, m, slot, s.engine.sign)
        return m


def comb(n: int, orientation: Orientation, first: int = 0):
    """The tree of the ``n``-fold parenthesization, variables from ``first``."""
    if orientation is Orientation.RIGHT:
        return right_comb(n, first=first)
    t = left_comb(n)
    return shift(t, first) if t is not None and first else t


def shift(t, offset: int):
    if isinstance(t, Leaf):
        return Leaf(t.var + offset)
    return type(t)(t.label, tuple(shift(c, offset) for c in t.children))


def build_parenthesization(s: PseudoTensorStructure, n: int, orientation: Orientation = Orientation.LEFT
                           ) -> Parenthesization:
    """``U`` for ``n = -1``, the identity bimodule for ``n = 0`` and the
    iterated product of ``n`` copies of ``G`` otherwise; the zero module
    for ``n <= -2``."""
    if n <= -2:
        return Parenthesization(n, orientation, None, zero_module(s.algebra, 0))
    tree = comb(n, orientation)
    slot = 1 if orientation is Orientation.LEFT else 2
    trace = tuple([slot] * (n - 1)) if n >= 2 else ()
    return Parenthesization(n, orientation, tree, s.module(tree), trace)


def _iter_shift(t, i: int, n: int):
    """Leaf ``i - 1`` of ``t`` becomes ``G(x_{i-1}, x_i)``; later leaves move up."""
    blocks = {}
    for v in range(n):
        if v < i - 1:
            blocks[v] = X[v]
        elif v == i - 1:
            blocks[v] = g(X[v], X[v + 1])
        else:
            blocks[v] = X[v + 1]
    return substitute(t, blocks)


@dataclass(frozen=True)
class HorizontalTerm:
    """One summand of ``d_h`` out of column ``n``: apply ``eta`` at ``addr``
    of ``source`` and pad from the left comb to the right comb."""

    index: int
    sign: int
    source: object
    addr: tuple[int, ...]
    target: object
    padding_sign: int = 1


class DYDoubleComplex:
    """Bidegrees ``(n, m)`` with ``0 <= n <= max_n`` and ``m - 1`` in the window.

    Only ``m >= 0`` is kept.  Bases are those of the Hom spaces of the
    structure, so coordinates are stable across runs.
    """

    def __init__(self, s: PseudoTensorStructure, max_n: int = 5, window: Sequence[int] = (-4, 4), *,
                 convention: TotalSign = TotalSign.HORIZONTAL_FIRST, cap: int | None = None):
        if max_n < 1:
            raise ValueError("max_n must be at least 1")
        lo, hi = int(window[0]), int(window[1])
        if lo > hi:
            raise ValueError("empty degree window")
        self.s = s
        self.field = s.field
        self.max_n = int(max_n)
        self.window = (lo, hi)
        self.convention = convention
        self.cap = s.cap if cap is None else cap
        if self.cap != s.cap:
            s.cap = self.cap
            s._spaces.clear()
        self.columns = {n: s.hom(left_comb(n - 1), right_comb(n - 1)) for n in range(self.max_n + 1)}
        self._dh: dict[tuple[int, int], Matrix] = {}
        self._dv: dict[tuple[int, int], Matrix] = {}
        self._terms: dict[int, list[HorizontalTerm]] = {}
        self._double: DoubleComplex | None = None
        self._total: CochainComplex | None = None

    # -- shape --------------------------------------------------------------------
    def rows(self) -> range:
        lo, hi = self.window
        return range(max(0, lo + 1), hi + 2)

    def in_range(self, n: int, m: int) -> bool:
        return 0 <= n <= self.max_n and m in self.rows()

    def dim(self, n: int, m: int) -> int:
        if not self.in_range(n, m):
            return 0
        return self.columns[n].dim(m - 1)

    def basis(self, n: int, m: int) -> list[Morphism]:
        return self.columns[n].basis(m - 1) if self.in_range(n, m) else []

    def dims(self) -> dict[tuple[int, int], int]:
        return {(n, m): self.dim(n, m) for n in range(self.max_n + 1) for m in self.rows()}

    def known_zero(self, n: int, m: int) -> bool:
        """True when ``(n, m)`` lies outside the range but is provably zero."""
        if m < 0 or n < 0:
            return True
        if n > self.max_n:
            return False
        rng = self.columns[n].degree_range()
        return rng is None or not rng[0] <= m - 1 <= rng[1]

    def complete(self, j: int) -> bool:
        """Whether every bidegree of total degree ``j`` was computed or is zero."""
        return all(self.in_range(n, j - n) or self.known_zero(n, j - n) for n in range(0, j + 1))

    def morphism(self, n: int, m: int, coords) -> Morphism:
        return self.columns[n].from_coordinates(m - 1, list(coords))

    def coordinates(self, n: int, f: Morphism) -> list:
        return self.columns[n].coordinates(f)

    # -- differentials -----------------------------------------------------------
    def vertical_differential(self, n: int, m: int) -> Matrix:
        """``d_v: (n, m) -> (n, m+1)`` in the stored bases."""
        key = (n, m)
        if key not in self._dv:
            src, tgt = self.dim(n, m), self.dim(n, m + 1)
            if src and tgt:
                self._dv[key] = self.columns[n].differential(m - 1)
            else:
                self._dv[key] = Matrix.zeros(self.field, tgt, src)
        return self._dv[key]

    def horizontal_terms(self, n: int) -> list[HorizontalTerm]:
        """The ``n + 2`` summands of ``d_h`` out of column ``n``."""
        if n in self._terms:
            return self._terms[n]
        s = self.s
        lt, rt = left_comb(n - 1), right_comb(n - 1)
        left_new = left_comb(n)
        specs = [(0, 1, g(X[0], comb(n - 1, Orientation.LEFT, 1)), (1,))]
        for i in range(1, n + 1):
            specs.append((i, (-1) ** i, _iter_shift(lt, i, n), ()))
        specs.append((n + 1, (-1) ** (n + 1), g(lt, X[n]), (0,)))
        terms = []
        for i, sign, src, addr in specs:
            tgt = _apply_tree(src, addr, lt, rt)
            psign = (-1) ** (s.padding_sign(src, tgt, left_new) % 2) if s.mode is Mode.HOMOTOPY else 1
            terms.append(HorizontalTerm(i, sign, src, addr, tgt, psign))
        self._terms[n] = terms
        return terms

    def horizontal_image(self, n: int, eta: Morphism) -> Morphism:
        """``d_h(eta)`` as a map in column ``n + 1`` (before taking coordinates)."""
        s = self.s
        lt, rt = left_comb(n - 1), right_comb(n - 1)
        left_new = left_comb(n)
        total = None
        for term in self.horizontal_terms(n):
            tgt, f = s.apply(eta, lt, rt, term.source, term.addr)
            if tgt != term.target:
                raise PaddingError(f"term {term.index} landed on {tgt}, expected {term.target}")
            padded, _ = s.pad(f, term.source, tgt, left_new)
            if term.sign < 0:
                padded = -padded
            total = padded if total is None else total + padded
        return total

    def horizontal_differential(self, n: int, m: int) -> Matrix:
        """``d_h: (n, m) -> (n+1, m)`` in the stored bases."""
        key = (n, m)
        if key not in self._dh:
            src, tgt = self.dim(n, m), self.dim(n + 1, m)
            if src and tgt:
                col = self.columns[n + 1]
                cols = [col.coordinates(self.horizontal_image(n, b)) for b in self.basis(n, m)]
                self._dh[key] = Matrix.from_columns(self.field, tgt, cols)
            else:
                self._dh[key] = Matrix.zeros(self.field, tgt, src)
        return self._dh[key]

    # -- assembly -----------------------------------------------------------------
    def incomplete_degrees(self) -> frozenset[int]:
        top = self.max_n + max(self.rows()) + 1
        return frozenset(j for j in range(0, top + 1) if not self.complete(j))

    def double_complex(self) -> DoubleComplex:
        if self._double is None:
            dims = self.dims()
            dh, dv = {}, {}
            for (n, m), d in dims.items():
                if not d:
                    continue
                if n + 1 <= self.max_n:
                    dh[(n, m)] = self.horizontal_differential(n, m)
                if m + 1 in self.rows():
                    dv[(n, m)] = self.vertical_differential(n, m)
            self._double = DoubleComplex(self.field, dims, dh, dv, unreliable=self.incomplete_degrees())
        return self._double

    def check(self) -> list[str]:
        """Failing identities among d_h^2 = 0, d_v^2 = 0 and (anti)commutation."""
        dc = self.double_complex()
        bad = dc.check_squares()
        if dc.commutation() == "neither":
            bad.append("d_h and d_v neither commute nor anticommute")
        return bad

    def signed(self) -> bool:
        return self.double_complex().commutation() != "anticommute"

    def block_signs(self, n: int, m: int) -> tuple[int, int]:
        """Coefficients of ``d_h`` and ``d_v`` on ``(n, m)`` in the total differential."""
        return total_sign(self.convention, n, m) if self.signed() else (1, 1)

    def total(self) -> CochainComplex:
        if self._total is None:
            dc = self.double_complex()
            bad = dc.check_squares()
            if any(b.startswith("d_h") for b in bad):
                raise PaddingError("padded horizontal differential does not square to zero: " + "; ".join(bad))
            self._total = totalize(dc, self.convention)
        return self._total

    def total_components(self, k: int) -> list[tuple[int, int]]:
        return components(self.double_complex(), k)

    def split(self, k: int, vec: Sequence) -> dict[tuple[int, int], list]:
        """Cut a Tot^k coordinate vector into its ``(n, m)`` blocks."""
        out, off = {}, 0
        for b in self.total_components(k):
            d = self.double_complex().dims[b]
            out[b] = list(vec[off:off + d])
            off += d
        if off != len(vec):
            raise ValueError(f"vector of length {len(vec)} does not fit Tot^{k} (dim {off})")
        return out

    def join(self, k: int, blocks: dict[tuple[int, int], Sequence]) -> list:
        fld = self.field
        out = []
        for b in self.total_components(k):
            d = self.double_complex().dims[b]
            v = blocks.get(b)
            out.extend([fld.coerce(x) for x in v] if v is not None else [fld.zero] * d)
        return out

    def d_tot(self, k: int) -> Matrix:
        return self.total().d(k)

    def dims_table(self) -> list[tuple[int, int, int]]:
        return [(n, m, d) for (n, m), d in sorted(self.dims().items())]

    def __repr__(self):
        return f"DYDoubleComplex({self.s.name}, max_n={self.max_n}, window={self.window})"


def _apply_tree(tree, addr, pattern_src, pattern_tgt):
    sub = subtree(tree, addr)
    blocks = {}

    def match(p, t):
        if isinstance(p, Leaf):
            blocks[p.var] = t
            return
        for pc, tc in zip(p.children, t.children):
            match(pc, tc)

    match(pattern_src, sub)
    return replace(tree, addr, substitute(pattern_tgt, blocks))


def build_dy(s: PseudoTensorStructure, max_n: int = 5, degree_window: Sequence[int] = (-4, 4), *,
             convention: TotalSign = TotalSign.HORIZONTAL_FIRST, cap: int | None = None,
             check: bool = True) -> DYDoubleComplex:
    """Build every ``DY^{n,m}`` in range together with both differentials.

    With ``check`` the squares and the (anti)commutation of the two
    differentials are verified and the total complex is formed.
    """
    dc = DYDoubleComplex(s, max_n, degree_window, convention=convention, cap=cap)
    dc.double_complex()
    if check:
        bad = dc.check()
        if bad:
            raise ComplexError("DY double complex is inconsistent: " + "; ".join(bad))
        dc.total()
    return dc


def vertical_differential(dc: DYDoubleComplex, n: int, m: int) -> Matrix:
    return dc.vertical_differential(n, m)


def horizontal_differential(dc: DYDoubleComplex, n: int, m: int) -> Matrix:
    return dc.horizontal_differential(n, m)


@dataclass
class HDYReport(CohomologyReport):
    """Cohomology in one total degree, representatives cut into blocks."""

    degree: int = 0
    blocks: list[dict[tuple[int, int], list]] = field(default_factory=list)
    component_dims: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.betti.get(self.degree, 0)


def hdy(dc: DYDoubleComplex, k: int, *, strict: bool = True) -> HDYReport:
    """``HDY^k``.  Refuses (``WindowError``) unless Tot^{k-1..k+1} are complete;
    with ``strict=False`` the answer is returned with an ``unreliable`` flag."""
    missing = [j for j in (k - 1, k, k + 1) if not dc.complete(j)]
    if missing and strict:
        raise WindowError(f"HDY^{k} needs total degrees {k - 1}..{k + 1} complete; "
                          f"incomplete: {missing} (max_n={dc.max_n}, window={dc.window})")
    tot = dc.total()
    rep = cohomology(tot, degrees=[k])
    reps = rep.representatives.get(k, [])
    comp_dims = {b: dc.double_complex().dims[b] for b in dc.total_components(k)}
    return HDYReport(rep.field, rep.betti, rep.representatives, frozenset([k]) if missing else frozenset(),
                     degree=k, blocks=[dc.split(k, v) for v in reps], component_dims=comp_dims)


def hdy_table(dc: DYDoubleComplex, degrees=None) -> list[HDYReport]:
    """Non-refusing ``hdy`` over a range of degrees (default: all computed)."""
    if degrees is None:
        degrees = range(0, dc.max_n + max(dc.rows()) + 1)
    return [hdy(dc, k, strict=False) for k in degrees]


# -- deformations -------------------------------------------------------------------

@dataclass(frozen=True)
class Dual:
    """``a + b x`` with ``x^2 = 0``, both parts morphisms over the ground field."""

    a: Morphism
    b: Morphism

    def __matmul__(self, other: "Dual") -> "Dual":
        return Dual(self.a @ other.a, self.a @ other.b + self.b @ other.a)

    def __add__(self, other: "Dual") -> "Dual":
        return Dual(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Dual") -> "Dual":
        return Dual(self.a - other.a, self.b - other.b)


@dataclass
class Deformation:
    """A first-order deformation of the associator from a Tot^4 cocycle."""

    coords: list
    blocks: dict[tuple[int, int], list]
    eta31: Morphism
    eta40: Morphism
    complex: DYDoubleComplex = field(repr=False)

    @property
    def alpha(self) -> Dual:
        return Dual(self.complex.s.alpha, self.eta31)

    def component(self, n: int, m: int) -> Morphism:
        dc = self.complex
        v = self.blocks.get((n, m))
        return dc.morphism(n, m, v) if v is not None else dc.columns[n].zero(m - 1)


def deformation_from_cocycle(dc: DYDoubleComplex, coords: Sequence) -> Deformation:
    """Wrap a Tot^4 vector; raises ``ValueError`` unless it is a cocycle."""
    fld = dc.field
    vec = [fld.coerce(x) for x in coords]
    if any(x != 0 for x in dc.d_tot(4).apply(vec)):
        raise ValueError("vector is not a cocycle of the total complex")
    blocks = dc.split(4, vec)

    def comp(n, m):
        v = blocks.get((n, m))
        return dc.morphism(n, m, v) if v is not None else dc.columns[n].zero(m - 1)

    return Deformation(vec, blocks, comp(3, 1), comp(4, 0), dc)


def first_order_deformations(s: PseudoTensorStructure, dc: DYDoubleComplex | None = None, **kw
                             ) -> list[Deformation]:
    """One deformation per basis class of ``HDY^4``."""
    if dc is None:
        dc = build_dy(s, **kw)
    rep = hdy(dc, 4)
    out = [deformation_from_cocycle(dc, v) for v in rep.representatives.get(4, [])]
    return out


@dataclass
class PentagonReport:
    """Pentagon over the dual numbers split into its two coefficients."""

    eps0: Morphism
    eps1: Morphism
    expected1: Morphism

    @property
    def eps0_ok(self) -> bool:
        return self.eps0.is_zero()

    @property
    def eps1_ok(self) -> bool:
        return self.eps1.is_zero()

    @property
    def ok(self) -> bool:
        return self.eps0_ok and self.eps1_ok

    def __str__(self):
        state = lambda b: "pass" if b else "FAIL"  # noqa: E731
        return f"eps^0 {state(self.eps0_ok)}, eps^1 {state(self.eps1_ok)}"


def pentagon_dual(s: PseudoTensorStructure, alpha: Dual) -> Dual:
    """``a o a - (Id x a) o a o (a x Id)`` for a dual associator ``a``."""
    (f2, f1), (h3, h2, h1) = pentagon_composites(s, alpha.a)
    (g2, g1), (k3, k2, k1) = pentagon_composites(s, alpha.b)
    return (Dual(f2, g2) @ Dual(f1, g1)) - (Dual(h3, k3) @ Dual(h2, k2) @ Dual(h1, k1))


def verify_deformed_pentagon(s: PseudoTensorStructure, d: Deformation) -> PentagonReport:
    """The residuals of the deformed pentagon.

    The ``x^0`` part is compared with the undeformed witness (``D eta`` if
    the structure carries one, zero otherwise).  The ``x^1`` part must equal
    ``d_v(eta^{4,0})`` up to the sign the total differential puts between
    the ``(3, 1) -> (4, 1)`` and ``(4, 0) -> (4, 1)`` blocks.
    """
    dc = d.complex
    p = pentagon_dual(s, Dual(s.alpha, d.eta31))
    base = s.eta.differential() if s.eta is not None else None
    eps0 = p.a - base if base is not None else p.a
    sh, _ = dc.block_signs(3, 1)
    _, sv = dc.block_signs(4, 0)
    expected = d.eta40.differential()
    if sh * sv < 0:
        expected = -expected
    return PentagonReport(eps0, p.b - expected, expected)


@dataclass
class EquivalenceCertificate:
    equivalent: bool
    preimage: list | None

    def __bool__(self):
        return self.equivalent


def deformation_equivalent(s: PseudoTensorStructure, d1: Deformation, d2: Deformation) -> EquivalenceCertificate:
    """Whether ``d1 - d2`` is a coboundary; the certificate solves
    ``d_tot^3 x = d1 - d2``."""
    dc = d1.complex
    if d2.complex is not dc or dc.s is not s:
        raise ValueError("deformations come from different complexes")
    fld = dc.field
    diff = [fld.sub(a, b) for a, b in zip(d1.coords, d2.coords)]
    n3 = dc.total().dim(3)
    if all(x == 0 for x in diff):
        return EquivalenceCertificate(True, [fld.zero] * n3)
    if n3 == 0:
        return EquivalenceCertificate(False, None)
    sol = solve(dc.d_tot(3), Matrix.from_columns(fld, len(diff), [diff]))
    if sol is None:
        return EquivalenceCertificate(False, None)
    return EquivalenceCertificate(True, sol.column(0))


def perturb(d: Deformation, x: Sequence) -> Deformation:
    """``d + d_tot^3(x)`` for a Tot^3 vector ``x``."""
    dc = d.complex
    fld = dc.field
    dx = dc.d_tot(3).apply([fld.coerce(v) for v in x])
    return deformation_from_cocycle(dc, [fld.add(a, b) for a, b in zip(d.coords, dx)])


__all__ = [
    "Orientation", "Parenthesization", "build_parenthesization", "DYDoubleComplex", "HorizontalTerm",
    "build_dy", "vertical_differential", "horizontal_differential", "hdy", "hdy_table", "HDYReport",
    "Dual", "Deformation", "deformation_from_cocycle", "first_order_deformations", "PentagonReport",
    "pentagon_dual", "verify_deformed_pentagon", "EquivalenceCertificate", "deformation_equivalent",
    "perturb",
]
