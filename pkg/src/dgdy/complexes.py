"""Cochain complexes, double complexes and their cohomology.

Differentials raise degree by one.  A complex stores, for each supported
degree ``n``, the dimension and the matrix ``d_n`` of shape
``dims(n+1) x dims(n)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .exactfield import Field, Matrix, SparseEchelon, kernel_basis, rank


class ComplexError(ValueError):
    """A differential does not square to zero or shapes disagree."""


class TotalSign(enum.Enum):
    """Sign convention for the total differential on bidegree (n, m).

    ``HORIZONTAL_FIRST``: d_tot = d_h + (-1)^n d_v  (default).
    ``VERTICAL_FIRST``:   d_tot = d_v + (-1)^m d_h.
    """

    HORIZONTAL_FIRST = "h"
    VERTICAL_FIRST = "v"


class CochainComplex:
    """A bounded cochain complex of finite-dimensional vector spaces."""

    def __init__(self, field: Field, dims: Mapping[int, int], differentials: Mapping[int, Matrix] | None = None,
                 *, unreliable: frozenset[int] | set[int] = frozenset(), check: bool = True):
        self.field = field
        self.dims = {int(n): int(d) for n, d in dims.items() if d > 0}
        self.support = sorted(self.dims)
        self._d: dict[int, Matrix] = {}
        self.unreliable = frozenset(unreliable)
        for n, mat in (differentials or {}).items():
            src, tgt = self.dim(n), self.dim(n + 1)
            if mat.field is not field:
                raise ComplexError(f"differential d_{n} lives over {mat.field}, expected {field}")
            if mat.shape != (tgt, src):
                raise ComplexError(f"d_{n} has shape {mat.shape}, expected {(tgt, src)}")
            if src and tgt and not mat.is_zero():
                self._d[n] = mat
        if check:
            self.check()

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def d(self, n: int) -> Matrix:
        """The differential out of degree ``n`` (zero matrix if absent)."""
        mat = self._d.get(n)
        if mat is None:
            return Matrix.zeros(self.field, self.dim(n + 1), self.dim(n))
        return mat

    def check(self):
        for n in sorted(self._d):
            if n + 1 in self._d:
                if not (self._d[n + 1] @ self._d[n]).is_zero():
                    raise ComplexError(f"d^2 != 0 at degree {n}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * d for n, d in self.dims.items())

    def __repr__(self):
        dims = ", ".join(f"{n}:{d}" for n, d in sorted(self.dims.items()))
        return f"CochainComplex[{self.field}]({dims})"


@dataclass
class CohomologyReport:
    """Betti numbers with representative cocycles per degree.

    ``representatives[n]`` is a list of coordinate vectors (raw field
    values) in the degree-``n`` chain space.  ``unreliable`` holds degrees
    whose value may be an artifact of truncation.
    """

    field: Field
    betti: dict[int, int]
    representatives: dict[int, list[list]] = field(default_factory=dict)
    unreliable: frozenset[int] = frozenset()

    def betti_list(self, lo: int, hi: int) -> list[int]:
        return [self.betti.get(n, 0) for n in range(lo, hi + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * b for n, b in self.betti.items())


def _complement_reps(fld: Field, image_cols: list[list], kernel_cols: list[list], dim: int) -> list[list]:
    """Kernel vectors that are independent modulo the image."""
    ech = SparseEchelon(fld)
    for v in image_cols:
        ech.add({i: x for i, x in enumerate(v) if x})
    return [list(v) for v in kernel_cols if ech.add({i: x for i, x in enumerate(v) if x})]


def cohomology(c: CochainComplex, *, representatives: bool = True, degrees=None) -> CohomologyReport:
    """Betti numbers ``dim ker d_n - rank d_{n-1}`` and representative cocycles."""
    c.check()
    fld = c.field
    degs = sorted(c.dims) if degrees is None else sorted(degrees)
    betti: dict[int, int] = {}
    reps: dict[int, list[list]] = {}
    rank_cache: dict[int, int] = {}

    def rk(n):
        if n not in rank_cache:
            rank_cache[n] = rank(c.d(n)) if n in c._d else 0
        return rank_cache[n]

    for n in degs:
        dim = c.dim(n)
        if dim == 0:
            betti[n] = 0
            continue
        b = dim - rk(n) - rk(n - 1)
        betti[n] = b
        if representatives and b:
            ker = kernel_basis(c.d(n)).columns()
            img = c.d(n - 1).columns() if (n - 1) in c._d else []
            reps[n] = _complement_reps(fld, img, ker, dim)
            assert len(reps[n]) == b
    unreliable = frozenset(n for n in c.unreliable if n in betti or not degrees)
    return CohomologyReport(fld, betti, reps, unreliable)


def truncate(c: CochainComplex, lo: int, hi: int) -> CochainComplex:
    """Brutal truncation to degrees ``[lo, hi]``.

    Cohomology at ``lo`` and ``hi`` may differ from the untruncated complex;
    those degrees are flagged in ``unreliable`` (as are degrees that were
    already unreliable).
    """
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    dims = {n: d for n, d in c.dims.items() if lo <= n <= hi}
    diffs = {n: c.d(n) for n in range(lo, hi) if n in c._d}
    flags = set(n for n in c.unreliable if lo <= n <= hi)
    if any(n < lo for n in c.dims) or any(n in c._d for n in [lo - 1]):
        flags.add(lo)
    if any(n > hi for n in c.dims):
        flags.add(hi)
    return CochainComplex(c.field, dims, diffs, unreliable=flags, check=False)


class DoubleComplex:
    """Bigraded vector spaces with horizontal and vertical differentials.

    ``d_h[(n, m)]`` maps (n, m) to (n+1, m); ``d_v[(n, m)]`` maps (n, m) to
    (n, m+1).  Both must square to zero; they may either commute (the sign
    convention then makes the total differential square to zero) or already
    anticommute (then they are summed as given).
    """

    def __init__(self, field: Field, dims: Mapping[tuple[int, int], int],
                 d_h: Mapping[tuple[int, int], Matrix] | None = None,
                 d_v: Mapping[tuple[int, int], Matrix] | None = None,
                 *, unreliable: frozenset[int] = frozenset()):
        self.field = field
        self.dims = {(int(n), int(m)): int(d) for (n, m), d in dims.items() if d > 0}
        self._h: dict[tuple[int, int], Matrix] = {}
        self._v: dict[tuple[int, int], Matrix] = {}
        self.unreliable = frozenset(unreliable)
        for store, src, step in ((self._h, d_h or {}, (1, 0)), (self._v, d_v or {}, (0, 1))):
            for (n, m), mat in src.items():
                tgt = (n + step[0], m + step[1])
                shape = (self.dim(*tgt), self.dim(n, m))
                if mat.shape != shape:
                    raise ComplexError(f"differential at {(n, m)} has shape {mat.shape}, expected {shape}")
                if shape[0] and shape[1] and not mat.is_zero():
                    store[(n, m)] = mat

    def dim(self, n: int, m: int) -> int:
        return self.dims.get((n, m), 0)

    def dh(self, n: int, m: int) -> Matrix:
        mat = self._h.get((n, m))
        return mat if mat is not None else Matrix.zeros(self.field, self.dim(n + 1, m), self.dim(n, m))

    def dv(self, n: int, m: int) -> Matrix:
        mat = self._v.get((n, m))
        return mat if mat is not None else Matrix.zeros(self.field, self.dim(n, m + 1), self.dim(n, m))

    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted(self.dims)

    def total_degrees(self) -> list[int]:
        return sorted({n + m for n, m in self.dims})

    def check_squares(self) -> list[str]:
        """Names of failing identities among d_h^2 = 0 and d_v^2 = 0."""
        bad = []
        for (n, m) in self.bidegrees():
            if not (self.dh(n + 1, m) @ self.dh(n, m)).is_zero():
                bad.append(f"d_h^2 at {(n, m)}")
            if not (self.dv(n, m + 1) @ self.dv(n, m)).is_zero():
                bad.append(f"d_v^2 at {(n, m)}")
        return bad

    def commutation(self) -> str:
        """'commute', 'anticommute', 'both' (all squares vanish) or 'neither'."""
        com = anti = True
        for (n, m) in self.bidegrees():
            a = self.dv(n + 1, m) @ self.dh(n, m)
            b = self.dh(n, m + 1) @ self.dv(n, m)
            if not (a - b).is_zero():
                com = False
            if not (a + b).is_zero():
                anti = False
        if com and anti:
            return "both"
        if com:
            return "commute"
        if anti:
            return "anticommute"
        return "neither"


def total_sign(convention: TotalSign, n: int, m: int) -> tuple[int, int]:
    """Coefficients (of d_h, of d_v) on bidegree (n, m)."""
    if convention is TotalSign.HORIZONTAL_FIRST:
        return 1, (-1) ** (n % 2)
    return (-1) ** (m % 2), 1


def components(dc: DoubleComplex, k: int) -> list[tuple[int, int]]:
    """Bidegrees of total degree ``k`` in the order used by :func:`totalize`."""
    return sorted(b for b in dc.dims if b[0] + b[1] == k)


def total_matrix(dc: DoubleComplex, k: int, convention: TotalSign = TotalSign.HORIZONTAL_FIRST,
                 signed: bool = True) -> Matrix:
    """Total differential from degree ``k`` to ``k+1`` as a block matrix."""
    src = components(dc, k)
    tgt = components(dc, k + 1)
    fld = dc.field
    rows = sum(dc.dims[b] for b in tgt)
    cols = sum(dc.dims[b] for b in src)
    data = [[fld.zero] * cols for _ in range(rows)]
    toff, off = {}, 0
    for b in tgt:
        toff[b] = off
        off += dc.dims[b]
    coff = 0
    for (n, m) in src:
        sh, sv = total_sign(convention, n, m) if signed else (1, 1)
        for blk, dest, s in ((dc._h.get((n, m)), (n + 1, m), sh), (dc._v.get((n, m)), (n, m + 1), sv)):
            if blk is None:
                continue
            r0 = toff[dest]
            for i, row in enumerate(blk.raw_rows()):
                drow = data[r0 + i]
                for j, x in enumerate(row):
                    if x:
                        drow[coff + j] = fld.add(drow[coff + j], x if s == 1 else fld.neg(x))
        coff += dc.dims[(n, m)]
    return Matrix.raw(fld, rows, cols, data)


def totalize(dc: DoubleComplex, convention: TotalSign = TotalSign.HORIZONTAL_FIRST) -> CochainComplex:
    """The total complex, with components ordered by increasing ``n``.

    If the two differentials commute, the sign ``convention`` is applied.
    If they already anticommute they are summed unchanged.  Anything else
    cannot give a square-zero total differential and is rejected.
    """
    bad = dc.check_squares()
    if bad:
        raise ComplexError("; ".join(bad))
    mode = dc.commutation()
    if mode == "neither":
        raise ComplexError("d_h and d_v neither commute nor anticommute; no sign assignment gives d_tot^2 = 0")
    signed = mode != "anticommute"
    degs = dc.total_degrees()
    dims = {k: sum(dc.dims[b] for b in components(dc, k)) for k in degs}
    diffs = {k: total_matrix(dc, k, convention, signed) for k in degs if k + 1 in dims}
    tot = CochainComplex(dc.field, dims, diffs, unreliable=dc.unreliable, check=False)
    try:
        tot.check()
    except ComplexError as exc:
        raise ComplexError(f"total differential does not square to zero: {exc}") from None
    return tot
