"""n-fold dg-bimodules: one right action, ``n_left`` left actions, a differential.

Slots are numbered ``0`` for the right action and ``1..n_left`` for the
left actions.  Basis elements are addressed by ``(degree, index)``.
Action and differential data are stored as sparse columns: the image of
basis element ``j`` of degree ``s`` is a dict ``{index: coeff}`` in the
target degree.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from ..exactfield import Field, Matrix, rref
from .algebra import DgAlgebra, ValidationReport, vec_add, vec_scale

RIGHT = 0


def _sparse_columns(mat: Matrix) -> list[dict]:
    cols = [dict() for _ in range(mat.cols)]
    for i, row in enumerate(mat.raw_rows()):
        for j, x in enumerate(row):
            if x != 0:
                cols[j][i] = x
    return cols


def _dense(fld: Field, cols: list[dict], nrows: int) -> Matrix:
    data = [[fld.zero] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, x in col.items():
            data[i][j] = x
    return Matrix.raw(fld, nrows, len(cols), data)


class NFoldBimodule:
    """A finite-dimensional n-fold dg-bimodule over a :class:`DgAlgebra`.

    ``right[(deg, a)]`` and ``left[slot-1][(deg, a)]`` are matrices from
    degree ``deg`` to degree ``deg + |a|``; ``diff[deg]`` maps ``deg`` to
    ``deg + 1``.  Missing entries are zero maps.  Construction does not
    validate; call :func:`validate_bimodule`.
    """

    def __init__(self, algebra: DgAlgebra, n_left: int, dims: Mapping[int, int],
                 diff: Mapping[int, Matrix] | None = None,
                 right: Mapping[tuple, Matrix] | None = None,
                 left: Sequence[Mapping[tuple, Matrix]] | None = None, *, name: str | None = None):
        if n_left < 0:
            raise ValueError("n_left must be nonnegative")
        self.algebra = algebra
        self.field = algebra.field
        self.n_left = n_left
        self.dims = {int(k): int(v) for k, v in dims.items() if v > 0}
        self.name = name or "M"
        self._cols: dict[tuple, list[dict]] = {}
        self._weights = None
        self._weights_done = False
        left = list(left or [])
        if len(left) > n_left:
            raise ValueError(f"{len(left)} left actions given for n_left={n_left}")
        for deg, mat in (diff or {}).items():
            self._store(("d", int(deg)), mat, self.dim(deg + 1), self.dim(deg))
        for slot, table in enumerate([right or {}] + left):
            for (deg, a), mat in table.items():
                a = algebra.index(a)
                tdeg = deg + algebra.degrees[a]
                self._store((slot, int(deg), a), mat, self.dim(tdeg), self.dim(deg))

    def _store(self, key, mat: Matrix, rows: int, cols: int):
        if mat.field is not self.field:
            raise ValueError(f"matrix for {key} is over {mat.field}, expected {self.field}")
        if mat.shape != (rows, cols):
            raise ValueError(f"matrix for {key} has shape {mat.shape}, expected {(rows, cols)}")
        self._cols[key] = _sparse_columns(mat)

    # -- basic data -------------------------------------------------------
    def dim(self, deg: int) -> int:
        return self.dims.get(deg, 0)

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def basis(self):
        for deg in self.degrees():
            for j in range(self.dims[deg]):
                yield deg, j

    def _compute(self, key) -> list[dict]:
        """Hook for subclasses computing columns lazily; default is zero."""
        return [dict() for _ in range(self.dim(key[1]))]

    def _columns(self, key) -> list[dict]:
        cols = self._cols.get(key)
        if cols is None:
            cols = self._compute(key)
            self._cols[key] = cols
        return cols

    def act(self, slot: int, a: int, deg: int, j: int) -> dict:
        """Image of basis element (deg, j) under algebra basis element ``a``
        acting in ``slot``; a sparse vector in degree ``deg + |a|``."""
        if not self.dim(deg):
            return {}
        return self._columns((slot, deg, a))[j]

    def d(self, deg: int, j: int) -> dict:
        if not self.dim(deg):
            return {}
        return self._columns(("d", deg))[j]

    def act_vec(self, slot: int, a: int, vec: Mapping) -> dict:
        """Act on a sparse vector keyed by ``(deg, index)``."""
        fld = self.field
        da = self.algebra.degrees[a]
        out: dict = {}
        for (deg, j), x in vec.items():
            for i, y in self.act(slot, a, deg, j).items():
                key = (deg + da, i)
                nv = fld.add(out.get(key, fld.zero), fld.mul(x, y))
                if nv == 0:
                    out.pop(key, None)
                else:
                    out[key] = nv
        return out

    def d_vec(self, vec: Mapping) -> dict:
        fld = self.field
        out: dict = {}
        for (deg, j), x in vec.items():
            for i, y in self.d(deg, j).items():
                key = (deg + 1, i)
                nv = fld.add(out.get(key, fld.zero), fld.mul(x, y))
                if nv == 0:
                    out.pop(key, None)
                else:
                    out[key] = nv
        return out

    def action_matrix(self, slot: int, a, deg: int) -> Matrix:
        a = self.algebra.index(a)
        tdeg = deg + self.algebra.degrees[a]
        cols = [self.act(slot, a, deg, j) for j in range(self.dim(deg))]
        return _dense(self.field, cols, self.dim(tdeg))

    def right_action(self, a, deg: int) -> Matrix:
        return self.action_matrix(RIGHT, a, deg)

    def left_action(self, slot: int, a, deg: int) -> Matrix:
        if not 1 <= slot <= self.n_left:
            raise IndexError(f"slot {slot} out of range 1..{self.n_left}")
        return self.action_matrix(slot, a, deg)

    def diff_matrix(self, deg: int) -> Matrix:
        cols = [self.d(deg, j) for j in range(self.dim(deg))]
        return _dense(self.field, cols, self.dim(deg + 1))

    def has_differential(self) -> bool:
        return any(c for deg in self.degrees() for c in self._columns(("d", deg)))

    # -- idempotent weights -------------------------------------------------
    def weights(self) -> dict | None:
        """Per basis element, the idempotent fixing it in every slot.

        Returns ``{(deg, j): (w_0, ..., w_n)}`` when the algebra has a
        complete orthogonal idempotent family and every basis element is
        homogeneous for it in every slot; otherwise ``None``.
        """
        if self._weights_done:
            return self._weights
        idems = self.algebra.idempotents()
        result: dict | None = None
        if idems is not None:
            result = {}
            one = self.field.one
            for deg, j in self.basis():
                w = []
                for slot in range(self.n_left + 1):
                    hit = None
                    for e in idems:
                        col = self.act(slot, e, deg, j)
                        if col == {j: one}:
                            if hit is not None:
                                hit = -1
                                break
                            hit = e
                        elif col:
                            hit = -1
                            break
                    if hit is None or hit == -1:
                        result = None
                        break
                    w.append(hit)
                if result is None:
                    break
                result[(deg, j)] = tuple(w)
        self._weights = result
        self._weights_done = True
        return result

    def __repr__(self):
        dims = ", ".join(f"{k}:{v}" for k, v in sorted(self.dims.items()))
        return f"{type(self).__name__}({self.name}, n_left={self.n_left}, dims={{{dims}}})"


def _sign(fld: Field, parity: int):
    return fld.one if parity % 2 == 0 else fld.neg(fld.one)


def validate_bimodule(m: NFoldBimodule) -> ValidationReport:
    """Check unit, associativity, commutation, Leibniz and ``d^2 = 0``."""
    rep = ValidationReport()
    A = m.algebra
    fld = m.field
    names = A.names
    slots = range(m.n_left + 1)
    basis = list(m.basis())

    def el(deg, j):
        return {(deg, j): fld.one}

    def act_alg(slot, u: dict, vec: dict) -> dict:
        out: dict = {}
        for a, x in u.items():
            vec_add(fld, out, m.act_vec(slot, a, vec), x)
        return out

    for deg, j in basis:
        x = el(deg, j)
        dx = m.d_vec(x)
        if m.d_vec(dx):
            rep.add("d^2", (deg, j), f"d(d(x)) != 0 for basis vector {j} in degree {deg}")
        for slot in slots:
            if act_alg(slot, A.unit, x) != x:
                rep.add("unit", (slot, deg, j), "1 does not act as the identity")
            for a in range(A.dim):
                ax = m.act_vec(slot, a, x)
                # Leibniz
                # right: d(x.a) = d(x).a + (-1)^|x| x.d(a); left: d(a.x) = d(a).x + (-1)^|a| a.d(x)
                lhs = m.d_vec(ax)
                da_x = act_alg(slot, A.d({a: fld.one}), x)
                adx = m.act_vec(slot, a, dx)
                if slot == RIGHT:
                    rhs = dict(adx)
                    vec_add(fld, rhs, da_x, _sign(fld, deg))
                else:
                    rhs = da_x
                    vec_add(fld, rhs, adx, _sign(fld, A.degrees[a]))
                if lhs != rhs:
                    rep.add("leibniz", (slot, names[a], deg, j), "action does not satisfy graded Leibniz")
                for b in range(A.dim):
                    # associativity within a slot
                    if slot == RIGHT:
                        lhs = m.act_vec(slot, b, ax)
                        rhs = act_alg(slot, A.mul_basis(a, b), x)
                    else:
                        lhs = m.act_vec(slot, a, m.act_vec(slot, b, x))
                        rhs = act_alg(slot, A.mul_basis(a, b), x)
                    if lhs != rhs:
                        rep.add("associativity", (slot, names[a], names[b], deg, j), "action is not associative")
                    for other in slots:
                        if other <= slot:
                            continue
                        p = m.act_vec(other, b, ax)
                        q = m.act_vec(slot, a, m.act_vec(other, b, x))
                        if slot != RIGHT and other != RIGHT:
                            q = vec_scale(fld, q, _sign(fld, A.degrees[a] * A.degrees[b]))
                        if p != q:
                            rep.add("commutation", (slot, other, names[a], names[b], deg, j),
                                    "actions in different slots do not commute")
    return rep


# -- standard bimodules ----------------------------------------------------

def identity_bimodule(A: DgAlgebra, n_left: int = 1, name: str = "A") -> NFoldBimodule:
    """``A`` with right multiplication and left multiplication in every slot.

    ``n_left`` is 1 for the identity bimodule and 0 for the free right
    module.  Basis elements of degree ``k`` are the algebra basis elements of
    that degree in index order.
    """
    fld = A.field
    pos: dict[int, tuple[int, int]] = {}
    dims: dict[int, int] = {}
    for i, deg in enumerate(A.degrees):
        pos[i] = (deg, dims.get(deg, 0))
        dims[deg] = dims.get(deg, 0) + 1
    m = NFoldBimodule(A, n_left, dims, name=name)

    def to_mod(vec: dict) -> dict:
        return {pos[k][1]: x for k, x in vec.items()}

    members = {deg: [i for i in range(A.dim) if A.degrees[i] == deg] for deg in dims}
    for deg, elems in members.items():
        m._cols[("d", deg)] = [to_mod(A.d({i: fld.one})) for i in elems]
        for a in range(A.dim):
            m._cols[(RIGHT, deg, a)] = [to_mod(A.mul_basis(i, a)) for i in elems]
            for slot in range(1, n_left + 1):
                m._cols[(slot, deg, a)] = [to_mod(A.mul_basis(a, i)) for i in elems]
    m.algebra_position = pos
    return m


def free_right_module(A: DgAlgebra) -> NFoldBimodule:
    return identity_bimodule(A, 0, name="A_A")


def right_ideal(A: DgAlgebra, idem, name: str | None = None) -> NFoldBimodule:
    """The right module ``idem * A``, with a basis extracted from ``idem * basis``."""
    fld = A.field
    e = A.element(idem) if not isinstance(idem, dict) else idem
    vecs = {}
    for deg in sorted(set(A.degrees)):
        members = [i for i in range(A.dim) if A.degrees[i] == deg]
        images = [A.mul(e, {i: fld.one}) for i in members]
        if not any(images):
            continue
        mat = Matrix.from_rows(fld, [[v.get(i, fld.zero) for i in range(A.dim)] for v in images])
        red, piv = rref(mat)
        vecs[deg] = [dict((i, x) for i, x in enumerate(r) if x != 0) for r in red.raw_rows()]
    return span_submodule(A, vecs, name or f"{A.names[A.index(idem)] if not isinstance(idem, dict) else 'e'}A")


def span_submodule(A: DgAlgebra, vecs: dict[int, list[dict]], name: str) -> NFoldBimodule:
    """Right submodule of ``A_A`` with the given per-degree basis (RREF rows)."""
    fld = A.field
    dims = {deg: len(v) for deg, v in vecs.items()}
    m = NFoldBimodule(A, 0, dims, name=name)
    pivots = {deg: [min(v) for v in vs] for deg, vs in vecs.items()}

    def coords(deg, vec: dict) -> dict:
        out = {}
        for r, p in enumerate(pivots.get(deg, [])):
            x = vec.get(p, fld.zero)
            if x != 0:
                out[r] = x
        # verify membership
        recon: dict = {}
        for r, x in out.items():
            vec_add(fld, recon, vecs[deg][r], x)
        if recon != {k: v for k, v in vec.items() if v != 0}:
            raise ValueError(f"{name} is not closed under the right action")
        return out

    for deg, vs in vecs.items():
        m._cols[("d", deg)] = [coords(deg + 1, A.d(v)) for v in vs]
        for a in range(A.dim):
            da = A.degrees[a]
            m._cols[(RIGHT, deg, a)] = [coords(deg + da, A.mul(v, {a: fld.one})) for v in vs]
    m.embedding = vecs
    return m


def direct_sum(m: NFoldBimodule, n: NFoldBimodule, name: str | None = None) -> NFoldBimodule:
    """``m`` followed by ``n`` in every degree."""
    if m.algebra is not n.algebra or m.n_left != n.n_left:
        raise ValueError("direct sum needs the same algebra and slot count")
    dims = {deg: m.dim(deg) + n.dim(deg) for deg in set(m.dims) | set(n.dims)}
    out = NFoldBimodule(m.algebra, m.n_left, dims, name=name or f"{m.name}+{n.name}")
    A = m.algebra
    for deg in dims:
        specs = [(("d", deg), 1, m.d, n.d)]
        for slot in range(m.n_left + 1):
            for a in range(A.dim):
                specs.append(((slot, deg, a), A.degrees[a],
                              lambda dg, j, s=slot, a=a: m.act(s, a, dg, j),
                              lambda dg, j, s=slot, a=a: n.act(s, a, dg, j)))
        for key, shift, mget, nget in specs:
            toff = m.dim(deg + shift)
            mc = [dict(mget(deg, j)) for j in range(m.dim(deg))]
            nc = [{i + toff: x for i, x in nget(deg, j).items()} for j in range(n.dim(deg))]
            out._cols[key] = mc + nc
    return out


def from_matrices(algebra: DgAlgebra, n_left: int, dims, diff=None, right=None, left=None, name=None):
    """Alias of the constructor, for symmetry with the cli parser."""
    return NFoldBimodule(algebra, n_left, dims, diff, right, left, name=name)


def permuted_basis(m: NFoldBimodule, perms: Mapping[int, Sequence[int]], name: str | None = None) -> NFoldBimodule:
    """Same module with basis of degree ``k`` reordered: new j = old perms[k][j]."""
    inv = {deg: {old: new for new, old in enumerate(p)} for deg, p in perms.items()}
    out = NFoldBimodule(m.algebra, m.n_left, m.dims, name=name or m.name)
    A = m.algebra

    def relabel(deg, col):
        mp = inv.get(deg)
        return {mp[i] if mp else i: x for i, x in col.items()}

    for deg in m.degrees():
        order = perms.get(deg, list(range(m.dim(deg))))
        out._cols[("d", deg)] = [relabel(deg + 1, m.d(deg, j)) for j in order]
        for slot in range(m.n_left + 1):
            for a in range(A.dim):
                out._cols[(slot, deg, a)] = [relabel(deg + A.degrees[a], m.act(slot, a, deg, j)) for j in order]
    return out


def zero_module(A: DgAlgebra, n_left: int) -> NFoldBimodule:
    return NFoldBimodule(A, n_left, {}, name="0")


__all__ = [
    "NFoldBimodule", "validate_bimodule", "identity_bimodule", "free_right_module", "right_ideal",
    "direct_sum", "permuted_basis", "zero_module", "RIGHT",
]
