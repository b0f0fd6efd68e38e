"""Graded morphisms between n-fold bimodules and the Hom complex."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..errors import DEFAULT_UNKNOWN_CAP, ResourceCapError
from ..exactfield import Field, Matrix, SparseEchelon
from .algebra import vec_add
from .bimodule import RIGHT, NFoldBimodule, _dense, _sparse_columns


def _sign(fld: Field, parity: int):
    return fld.one if parity % 2 == 0 else fld.neg(fld.one)


def _check_perm(n: int, perm) -> tuple[int, ...]:
    if perm is None:
        return tuple(range(n + 1))
    perm = tuple(perm)
    if len(perm) == n:
        perm = (0,) + perm
    if sorted(perm) != list(range(n + 1)) or perm[0] != 0:
        raise ValueError(f"{perm} is not a permutation of the slots 1..{n}")
    return perm


class Morphism:
    """A homogeneous graded linear map ``source -> target`` of some degree.

    ``blocks[s]`` holds the map from degree ``s`` of the source to degree
    ``s + degree`` of the target, stored as sparse columns.  ``perm[i]`` is
    the target slot matched with source slot ``i`` (identity by default);
    it only matters for equivariance.
    """

    __slots__ = ("source", "target", "degree", "perm", "cols")

    def __init__(self, source: NFoldBimodule, target: NFoldBimodule, degree: int,
                 blocks: Mapping[int, object] | None = None, perm=None):
        if source.algebra is not target.algebra:
            raise ValueError("source and target live over different algebras")
        if source.n_left != target.n_left:
            raise ValueError(f"slot counts differ: {source.n_left} vs {target.n_left}")
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.perm = _check_perm(source.n_left, perm)
        self.cols: dict[int, list[dict]] = {}
        for s, blk in (blocks or {}).items():
            rows, ncols = target.dim(s + self.degree), source.dim(s)
            if isinstance(blk, Matrix):
                if blk.shape != (rows, ncols):
                    raise ValueError(f"block {s} has shape {blk.shape}, expected {(rows, ncols)}")
                cols = _sparse_columns(blk)
            else:
                cols = [{i: x for i, x in c.items() if x != 0} for c in blk]
                if len(cols) != ncols:
                    raise ValueError(f"block {s} has {len(cols)} columns, expected {ncols}")
            if ncols and rows and any(cols):
                self.cols[s] = cols

    @property
    def field(self) -> Field:
        return self.source.field

    @classmethod
    def identity(cls, m: NFoldBimodule) -> "Morphism":
        one = m.field.one
        return cls(m, m, 0, {s: [{j: one} for j in range(m.dim(s))] for s in m.degrees()})

    @classmethod
    def zero(cls, source, target, degree=0, perm=None) -> "Morphism":
        return cls(source, target, degree, {}, perm)

    def column(self, s: int, j: int) -> dict:
        blk = self.cols.get(s)
        return blk[j] if blk is not None else {}

    def matrix(self, s: int) -> Matrix:
        rows = self.target.dim(s + self.degree)
        cols = self.cols.get(s) or [dict() for _ in range(self.source.dim(s))]
        return _dense(self.field, cols, rows)

    def apply(self, vec: Mapping) -> dict:
        """Apply to a sparse vector keyed by ``(deg, index)``."""
        fld = self.field
        out: dict = {}
        for (s, j), x in vec.items():
            for i, y in self.column(s, j).items():
                key = (s + self.degree, i)
                nv = fld.add(out.get(key, fld.zero), fld.mul(x, y))
                if nv == 0:
                    out.pop(key, None)
                else:
                    out[key] = nv
        return out

    def _like(self, other: "Morphism"):
        if not isinstance(other, Morphism):
            raise TypeError("expected a Morphism")
        if (other.source is not self.source or other.target is not self.target
                or other.degree != self.degree):
            raise ValueError("morphisms have different source, target or degree")

    def _combine(self, other: "Morphism", coef) -> "Morphism":
        self._like(other)
        fld = self.field
        out = {}
        for s in set(self.cols) | set(other.cols):
            n = self.source.dim(s)
            a = self.cols.get(s) or [dict() for _ in range(n)]
            b = other.cols.get(s) or [dict() for _ in range(n)]
            out[s] = [vec_add(fld, dict(x), y, coef) for x, y in zip(a, b)]
        return Morphism(self.source, self.target, self.degree, out, self.perm)

    def __add__(self, other):
        return self._combine(other, None)

    def __sub__(self, other):
        return self._combine(other, self.field.neg(self.field.one))

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def scale(self, c) -> "Morphism":
        fld = self.field
        c = fld.coerce(c)
        out = {s: [{i: fld.mul(c, x) for i, x in col.items()} if c != 0 else {} for col in blk]
               for s, blk in self.cols.items()}
        return Morphism(self.source, self.target, self.degree, out, self.perm)

    def compose(self, other: "Morphism") -> "Morphism":
        """``self o other``."""
        if other.target is not self.source:
            raise ValueError("cannot compose: target/source mismatch")
        fld = self.field
        out = {}
        for s, blk in other.cols.items():
            t = s + other.degree
            new = []
            for col in blk:
                acc: dict = {}
                for k, x in col.items():
                    vec_add(fld, acc, self.column(t, k), x)
                new.append(acc)
            out[s] = new
        perm = tuple(self.perm[other.perm[i]] for i in range(len(other.perm)))
        return Morphism(other.source, self.target, self.degree + other.degree, out, perm)

    __matmul__ = compose

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.cols.values())

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        if other.source is not self.source or other.target is not self.target or other.degree != self.degree:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def differential(self) -> "Morphism":
        """``D(f) = d_target o f - (-1)^|f| f o d_source``."""
        fld = self.field
        src, tgt = self.source, self.target
        sgn = _sign(fld, self.degree + 1)  # minus (-1)^|f|
        out = {}
        for s in src.degrees():
            if not tgt.dim(s + self.degree + 1):
                continue
            cols = []
            for j in range(src.dim(s)):
                acc: dict = {}
                for i, x in self.column(s, j).items():
                    vec_add(fld, acc, tgt.d(s + self.degree, i), x)
                for k, x in src.d(s, j).items():
                    vec_add(fld, acc, self.column(s + 1, k), fld.mul(sgn, x))
                cols.append(acc)
            out[s] = cols
        return Morphism(src, tgt, self.degree + 1, out, self.perm)

    def equivariance_defects(self, limit: int | None = None) -> list[tuple]:
        """(slot, algebra element, degree, basis index) where equivariance fails."""
        fld = self.field
        src, tgt = self.source, self.target
        A = src.algebra
        bad = []
        for slot in range(src.n_left + 1):
            tslot = self.perm[slot]
            for a in range(A.dim):
                da = A.degrees[a]
                sgn = _sign(fld, self.degree * da) if slot != RIGHT else fld.one
                for s in src.degrees():
                    for j in range(src.dim(s)):
                        lhs = self.apply(src.act_vec(slot, a, {(s, j): fld.one}))
                        rhs = tgt.act_vec(tslot, a, self.apply({(s, j): fld.one}))
                        if sgn != fld.one:
                            rhs = {k: fld.neg(x) for k, x in rhs.items()}
                        if lhs != rhs:
                            bad.append((slot, A.names[a], s, j))
                            if limit and len(bad) >= limit:
                                return bad
        return bad

    def is_invertible(self) -> bool:
        from ..exactfield import rank
        if self.degree != 0:
            return False
        degs = set(self.source.degrees()) | set(self.target.degrees())
        for s in degs:
            n = self.source.dim(s)
            if n != self.target.dim(s):
                return False
            if n and rank(self.matrix(s)) != n:
                return False
        return True

    def inverse(self) -> "Morphism":
        from ..exactfield import inverse
        if not self.is_invertible():
            raise ZeroDivisionError("morphism is not invertible")
        blocks = {s: inverse(self.matrix(s)) for s in self.source.degrees()}
        inv_perm = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv_perm[p] = i
        return Morphism(self.target, self.source, 0, blocks, inv_perm)

    def __repr__(self):
        return f"Morphism({self.source.name} -> {self.target.name}, degree {self.degree})"


class BimoduleMorphismSpace:
    """The Hom complex of equivariant graded maps between two n-fold bimodules.

    Bases are computed lazily per degree by solving the commutation
    equations.  The basis of degree ``k`` is canonical: basis map ``b``
    has entry one at the ``b``-th free unknown and zero at all other free
    unknowns, so coordinates of an equivariant map are read off directly.
    """

    def __init__(self, source: NFoldBimodule, target: NFoldBimodule, perm=None,
                 *, cap: int = DEFAULT_UNKNOWN_CAP, label: str | None = None):
        if source.algebra is not target.algebra:
            raise ValueError("algebra mismatch")
        if source.n_left != target.n_left:
            raise ValueError(f"slot count mismatch: {source.n_left} vs {target.n_left}")
        self.source = source
        self.target = target
        self.field = source.field
        self.perm = _check_perm(source.n_left, perm)
        self.cap = cap
        self.label = label or f"Hom({source.name}, {target.name})"
        self._solved: dict[int, tuple[list, list[int], list[dict]]] = {}
        self._basis: dict[int, list[Morphism]] = {}

    def degree_range(self) -> tuple[int, int] | None:
        s, t = self.source.degrees(), self.target.degrees()
        if not s or not t:
            return None
        return t[0] - s[-1], t[-1] - s[0]

    def unknowns(self, k: int) -> int:
        return sum(self.source.dim(s) * self.target.dim(s + k) for s in self.source.degrees())

    def _solve(self, k: int):
        if k in self._solved:
            return self._solved[k]
        total = self.unknowns(k)
        if total > self.cap:
            raise ResourceCapError(f"{self.label} in degree {k}", total, self.cap)
        src, tgt, fld, perm = self.source, self.target, self.field, self.perm
        A = src.algebra
        ws, wt = src.weights(), tgt.weights()
        use_weights = ws is not None and wt is not None
        n = src.n_left

        def tkey(i_w):
            return tuple(i_w[perm[slot]] for slot in range(n + 1))

        allowed: dict[tuple[int, int], list[int]] = {}
        var_list: list[tuple[int, int, int]] = []
        var_id: dict[tuple[int, int, int], int] = {}
        for s in src.degrees():
            t = s + k
            tdim = tgt.dim(t)
            if not tdim:
                continue
            if use_weights:
                groups: dict[tuple, list[int]] = {}
                for i in range(tdim):
                    groups.setdefault(tkey(wt[(t, i)]), []).append(i)
            for j in range(src.dim(s)):
                rows = groups.get(ws[(s, j)], []) if use_weights else list(range(tdim))
                allowed[(s, j)] = rows
                for i in rows:
                    var_id[(s, i, j)] = len(var_list)
                    var_list.append((s, i, j))
        ech = SparseEchelon(fld)
        idems = set(A.idempotents() or []) if use_weights else set()
        for slot in range(n + 1):
            tslot = perm[slot]
            for a in range(A.dim):
                if a in idems:
                    continue
                da = A.degrees[a]
                sgn = _sign(fld, k * da) if slot != RIGHT else fld.one
                for s in src.degrees():
                    for j in range(src.dim(s)):
                        eq: dict[int, dict] = {}
                        for jp, c in src.act(slot, a, s, j).items():
                            for ip in allowed.get((s + da, jp), ()):
                                row = eq.setdefault(ip, {})
                                v = var_id[(s + da, ip, jp)]
                                row[v] = fld.add(row.get(v, fld.zero), c)
                        for i in allowed.get((s, j), ()):
                            v = var_id[(s, i, j)]
                            for ip, c in tgt.act(tslot, a, s + k, i).items():
                                row = eq.setdefault(ip, {})
                                row[v] = fld.sub(row.get(v, fld.zero), fld.mul(sgn, c))
                        for row in eq.values():
                            if any(x != 0 for x in row.values()):
                                ech.add(row)
        null = ech.nullspace(len(var_list))
        # the free unknown is the unique non-pivot index of each vector
        piv = ech.rows
        free = [next(v for v in vec if v not in piv) for vec in null]
        self._solved[k] = (var_list, free, null)
        return self._solved[k]

    def dim(self, k: int) -> int:
        rng = self.degree_range()
        if rng is None or not rng[0] <= k <= rng[1]:
            return 0
        return len(self._solve(k)[2])

    def basis(self, k: int) -> list[Morphism]:
        if k in self._basis:
            return self._basis[k]
        rng = self.degree_range()
        if rng is None or not rng[0] <= k <= rng[1]:
            self._basis[k] = []
            return []
        var_list, free, null = self._solve(k)
        out = []
        for vec in null:
            blocks: dict[int, list[dict]] = {}
            for v, x in vec.items():
                s, i, j = var_list[v]
                if s not in blocks:
                    blocks[s] = [dict() for _ in range(self.source.dim(s))]
                blocks[s][j][i] = x
            out.append(Morphism(self.source, self.target, k, blocks, self.perm))
        self._basis[k] = out
        return out

    def zero(self, k: int) -> Morphism:
        return Morphism(self.source, self.target, k, {}, self.perm)

    def coordinates(self, f: Morphism, check: bool = True) -> list:
        """Coordinates of an equivariant map in the basis of its degree."""
        if f.source is not self.source or f.target is not self.target:
            raise ValueError("morphism does not belong to this Hom space")
        k = f.degree
        if self.dim(k) == 0:
            if check and not f.is_zero():
                raise ValueError("morphism is not equivariant (Hom space is zero)")
            return []
        var_list, free, _ = self._solve(k)
        fld = self.field
        coords = []
        for v in free:
            s, i, j = var_list[v]
            coords.append(f.column(s, j).get(i, fld.zero))
        if check:
            if not (self.from_coordinates(k, coords) - Morphism(f.source, f.target, k, f.cols, self.perm)).is_zero():
                raise ValueError(f"morphism of degree {k} is not in {self.label}")
        return coords

    def from_coordinates(self, k: int, coords: Sequence) -> Morphism:
        fld = self.field
        basis = self.basis(k)
        if len(coords) != len(basis):
            raise ValueError(f"expected {len(basis)} coordinates, got {len(coords)}")
        blocks: dict[int, list[dict]] = {}
        for b, c in zip(basis, coords):
            c = fld.coerce(c)
            if c == 0:
                continue
            for s, blk in b.cols.items():
                if s not in blocks:
                    blocks[s] = [dict() for _ in range(self.source.dim(s))]
                for j, col in enumerate(blk):
                    vec_add(fld, blocks[s][j], col, c)
        return Morphism(self.source, self.target, k, blocks, self.perm)

    def differential(self, k: int) -> Matrix:
        """Matrix of ``D`` from degree ``k`` to ``k + 1`` in the stored bases."""
        rows = self.dim(k + 1)
        cols = [self.coordinates(b.differential(), check=False) if rows else [] for b in self.basis(k)]
        fld = self.field
        data = [[cols[j][i] for j in range(len(cols))] for i in range(rows)]
        return Matrix.raw(fld, rows, len(cols), data) if cols else Matrix.zeros(fld, rows, 0)

    def __repr__(self):
        return f"BimoduleMorphismSpace({self.label})"


def hom_complex(m: NFoldBimodule, n: NFoldBimodule, perm=None, *, cap: int = DEFAULT_UNKNOWN_CAP) -> BimoduleMorphismSpace:
    """The complex of equivariant maps ``m -> n``.

    ``perm`` optionally matches source slot ``i`` with target slot
    ``perm[i-1]``.  Raises ``ValueError`` when the slot counts differ.
    """
    return BimoduleMorphismSpace(m, n, perm, cap=cap)
