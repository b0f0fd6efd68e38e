"""Tensor products of n-fold bimodules organised as trees.

A tree ``Node(label, children)`` describes an iterated tensor product: the
module named ``label`` has one left slot per child; a child that is a
``Leaf`` leaves the slot free, a child that is a ``Node`` is contracted
into it (the child's right action against the slot's left action).  The
free slots of the result are the leaves, left to right.

Elements are handled through *flat tuples*: one basis element per node
(atom), listed in post-order.  Every quotient basis element lifts to a
single flat tuple, and any flat tuple can be projected back to the
quotient, which is what makes applying structure maps at inner nodes
straightforward.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from ..errors import ValidationError
from ..exactfield import Field, SparseEchelon
from .algebra import DgAlgebra, vec_add
from .bimodule import RIGHT, NFoldBimodule, identity_bimodule, right_ideal
from .hom import Morphism


class TensorSign(enum.Enum):
    """Sign in the relation ``(v.f) (x) u ~ s . v (x) (f.u)``.

    ``SWAP``: ``s = (-1)^{|v||u|}`` (times the Koszul sign for any factors
    sitting between ``v`` and ``u``).  ``KOSZUL``: only the Koszul sign of
    moving ``f`` past the factors in between.  The two agree whenever no
    odd-degree elements meet.
    """

    SWAP = "swap"
    KOSZUL = "koszul"


class TensorError(ValidationError):
    """The relations of a tensor product are not compatible with the differential."""


# -- trees -----------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    var: int = 0

    def __repr__(self):
        return f"x{self.var}"


@dataclass(frozen=True)
class Node:
    label: str
    children: tuple = ()

    def __repr__(self):
        if not self.children:
            return self.label
        return f"{self.label}({', '.join(repr(c) for c in self.children)})"


def leaves(t) -> list[int]:
    if isinstance(t, Leaf):
        return [t.var]
    out = []
    for c in t.children:
        out.extend(leaves(c))
    return out


def shape(t):
    if isinstance(t, Leaf):
        return Leaf(0)
    return Node(t.label, tuple(shape(c) for c in t.children))


def atom_count(t) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(atom_count(c) for c in t.children)


def subtree(t, addr: Sequence[int]):
    for i in addr:
        t = t.children[i]
    return t


def replace(t, addr: Sequence[int], new):
    if not addr:
        return new
    i = addr[0]
    kids = list(t.children)
    kids[i] = replace(kids[i], addr[1:], new)
    return Node(t.label, tuple(kids))


def substitute(t, blocks: Mapping[int, object]):
    """Replace each leaf ``x_v`` by ``blocks[v]``."""
    if isinstance(t, Leaf):
        return blocks[t.var]
    return Node(t.label, tuple(substitute(c, blocks) for c in t.children))


def postorder_labels(t) -> list[str]:
    if isinstance(t, Leaf):
        return []
    out = []
    for c in t.children:
        out.extend(postorder_labels(c))
    out.append(t.label)
    return out


def atom_span(t, addr: Sequence[int]) -> tuple[int, int]:
    """Post-order positions ``[start, end)`` occupied by the subtree at ``addr``."""
    start = 0
    node = t
    for i in addr:
        for c in node.children[:i]:
            start += atom_count(c)
        node = node.children[i]
    return start, start + atom_count(node)


def slot_perm(src_tree, tgt_tree) -> tuple[int, ...]:
    """Target slot matched with each source slot via leaf variables."""
    sl, tl = leaves(src_tree), leaves(tgt_tree)
    if sorted(sl) != sorted(tl) or len(set(sl)) != len(sl):
        raise ValueError(f"leaf variables of {src_tree} and {tgt_tree} do not match")
    pos = {v: i + 1 for i, v in enumerate(tl)}
    return (0,) + tuple(pos[v] for v in sl)


def koszul_sign(degrees_in_order: Sequence[int], new_order: Sequence[int]) -> int:
    """Parity of the Koszul sign for permuting items into ``new_order``.

    ``new_order[k]`` is the old position of the item placed k-th.
    """
    parity = 0
    n = len(new_order)
    for a in range(n):
        da = degrees_in_order[new_order[a]]
        if da % 2 == 0:
            continue
        for b in range(a + 1, n):
            if new_order[b] < new_order[a] and degrees_in_order[new_order[b]] % 2:
                parity ^= 1
    return parity


# -- tree modules ----------------------------------------------------------

class TreeModule(NFoldBimodule):
    """The tensor product described by a tree (built by a :class:`TreeEngine`)."""

    def __init__(self, engine: "TreeEngine", tree: Node):
        label_mod = engine.labels[tree.label]
        if label_mod.n_left != len(tree.children):
            raise ValueError(f"{tree.label} has {label_mod.n_left} slots but {len(tree.children)} children given")
        n_left = len(leaves(tree))
        super().__init__(engine.algebra, n_left, {}, name=repr(tree))
        self.engine = engine
        self.tree = tree
        self.label = label_mod
        self.kids: list[tuple[int, TreeModule]] = []  # (slot index 1-based, module)
        self.slot_owner: list[tuple] = [None]
        for i, c in enumerate(tree.children, start=1):
            if isinstance(c, Leaf):
                self.slot_owner.append(("free", i))
            else:
                r = len(self.kids)
                cm = engine.module(c)
                self.kids.append((i, cm))
                for s in range(1, cm.n_left + 1):
                    self.slot_owner.append(("child", r, s))
        self.kid_atoms = [atom_count(subtree(tree, (i - 1,))) for i, _ in self.kids]
        self.n_atoms = 1 + sum(self.kid_atoms)
        self._build()
        self._flat_cache: dict = {}
        self._proj_cache: dict = {}

    # ambient tuples: (c_1, ..., c_k, p), each entry (deg, idx)
    def _build(self):
        eng = self.engine
        fld = self.field
        A = self.algebra
        L = self.label
        kids = self.kids
        use_w = eng.use_weights and L.weights() is not None and all(m.weights() is not None for _, m in kids)
        self._use_w = use_w
        lw = L.weights() if use_w else None
        kid_by_w = []
        for slot, m in kids:
            groups: dict = {}
            w = m.weights() if use_w else None
            for b in m.basis():
                key = w[b][RIGHT] if use_w else None
                groups.setdefault(key, []).append(b)
            kid_by_w.append(groups)
        amb: dict[int, list[tuple]] = {}
        for p in L.basis():
            choices = []
            for r, (slot, m) in enumerate(kids):
                key = lw[p][slot] if use_w else None
                choices.append(kid_by_w[r].get(key, []))
            for combo in itertools.product(*choices):
                deg = p[0] + sum(c[0] for c in combo)
                amb.setdefault(deg, []).append(combo + (p,))
        for deg in amb:
            amb[deg].sort()
        self.ambient = amb
        self.amb_index = {deg: {t: i for i, t in enumerate(ts)} for deg, ts in amb.items()}
        # relations: (c.a) (x) p - sgn c (x) (a.p); generators need not be ambient
        echs: dict[int, SparseEchelon] = {deg: SparseEchelon(fld) for deg in amb}
        idems = A.idempotents() if use_w else None
        swap = eng.sign is TensorSign.SWAP
        a_w = {}
        if idems is not None:
            one = fld.one
            for a in range(A.dim):
                lft = [e for e in idems if A.mul_basis(e, a) == {a: one}]
                rgt = [e for e in idems if A.mul_basis(a, e) == {a: one}]
                a_w[a] = (lft[0] if len(lft) == 1 else None, rgt[0] if len(rgt) == 1 else None)
        two = fld.add(fld.one, fld.one)
        for r, (slot, m) in enumerate(kids):
            for p in L.basis():
                others = []
                for q, (qslot, _) in enumerate(kids):
                    key = lw[p][qslot] if use_w else None
                    others.append(kid_by_w[q].get(key, []) if q != r else None)
                for a in range(A.dim):
                    da = A.degrees[a]
                    if idems is not None:
                        if a in idems:
                            # c.e (x) p = c (x) p for matching weights: only the sign can survive
                            if two == 0 or not swap or p[0] % 2 == 0:
                                continue
                            cands = [c for c in kid_by_w[r].get(a, []) if c[0] % 2] if lw[p][slot] == a else []
                            for c in cands:
                                for rest in itertools.product(*[o if o is not None else [c] for o in others]):
                                    t = rest + (p,)
                                    deg = sum(x[0] for x in t)
                                    echs[deg].add({self.amb_index[deg][t]: two})
                            continue
                        la, ra = a_w[a]
                        if ra is not None and ra != lw[p][slot]:
                            continue
                        cands = kid_by_w[r].get(la, []) if la is not None else list(m.basis())
                    else:
                        cands = list(m.basis())
                    for c in cands:
                        for rest in itertools.product(*[o if o is not None else [c] for o in others]):
                            t = rest + (p,)
                            tdeg = sum(x[0] for x in t) + da
                            idx = self.amb_index.get(tdeg)
                            if idx is None:
                                continue
                            between = sum(x[0] for x in t[r + 1:-1])
                            base = (c[0] * p[0]) if swap else 0
                            sgn = fld.one if (base + da * between) % 2 == 0 else fld.neg(fld.one)
                            rel: dict = {}
                            for i, x in m.act(RIGHT, a, c[0], c[1]).items():
                                k = idx.get(t[:r] + ((c[0] + da, i),) + t[r + 1:])
                                if k is not None:
                                    rel[k] = fld.add(rel.get(k, fld.zero), x)
                            for i, x in L.act(slot, a, p[0], p[1]).items():
                                k = idx.get(t[:-1] + ((p[0] + da, i),))
                                if k is not None:
                                    rel[k] = fld.sub(rel.get(k, fld.zero), fld.mul(sgn, x))
                            if any(v != 0 for v in rel.values()):
                                echs[tdeg].add(rel)
        self._ech = echs
        self.qbasis: dict[int, list[int]] = {}
        self.qpos: dict[int, dict[int, int]] = {}
        for deg, ts in amb.items():
            piv = echs[deg].rows
            free = [i for i in range(len(ts)) if i not in piv]
            if free:
                self.qbasis[deg] = free
                self.qpos[deg] = {a: j for j, a in enumerate(free)}
        self.dims = {deg: len(v) for deg, v in self.qbasis.items()}
        if eng.check_differential and (L.has_differential() or any(m.has_differential() for _, m in kids)):
            self._check_d_stable()

    def _proj_amb(self, deg: int, k: int) -> dict:
        """Projection of ambient basis vector ``k`` of degree ``deg`` (keys: quotient index)."""
        pos = self.qpos.get(deg, {})
        if k in pos:
            return {pos[k]: self.field.one}
        row = self._ech[deg].rows.get(k)
        if row is None:
            return {}
        fld = self.field
        return {pos[c]: fld.neg(x) for c, x in row.items() if c != k}

    def project_tuple(self, t: tuple) -> dict:
        """Project an ambient tuple (of child basis elements and a label
        element) to the quotient; keys are ``(deg, index)``."""
        deg = sum(x[0] for x in t)
        idx = self.amb_index.get(deg)
        if idx is None:
            return {}
        k = idx.get(t)
        if k is None:
            return {}
        return {(deg, j): x for j, x in self._proj_amb(deg, k).items()}

    def project_combo(self, vecs: Sequence[Mapping]) -> dict:
        """Project the tensor of sparse vectors (one per child, then label)."""
        fld = self.field
        out: dict = {}
        for items in itertools.product(*[list(v.items()) for v in vecs]):
            coef = fld.one
            for _, x in items:
                coef = fld.mul(coef, x)
            vec_add(fld, out, self.project_tuple(tuple(k for k, _ in items)), coef)
        return out

    def lift(self, deg: int, j: int) -> tuple:
        """Ambient tuple of quotient basis element ``(deg, j)``."""
        return self.ambient[deg][self.qbasis[deg][j]]

    def flat(self, deg: int, j: int) -> tuple:
        """Flat tuple (post-order atoms) of quotient basis element ``(deg, j)``."""
        key = (deg, j)
        out = self._flat_cache.get(key)
        if out is None:
            t = self.lift(deg, j)
            atoms: list = []
            for r, (_, m) in enumerate(self.kids):
                atoms.extend(m.flat(*t[r]))
            atoms.append(t[-1])
            out = tuple(atoms)
            self._flat_cache[key] = out
        return out

    def project_flat(self, atoms: tuple) -> dict:
        """Project a flat tuple (post-order atoms) to the quotient."""
        out = self._proj_cache.get(atoms)
        if out is not None:
            return out
        vecs = []
        pos = 0
        for r, (_, m) in enumerate(self.kids):
            n = self.kid_atoms[r]
            vecs.append(m.project_flat(atoms[pos:pos + n]))
            pos += n
        vecs.append({atoms[pos]: self.field.one})
        out = self.project_combo(vecs)
        self._proj_cache[atoms] = out
        return out

    def _tuple_d(self, t: tuple) -> list[tuple[object, list]]:
        """Leibniz expansion of d on an ambient tuple, as (sign-coef, vecs) terms."""
        fld = self.field
        terms = []
        acc_deg = 0
        mods = [m for _, m in self.kids] + [self.label]
        for r, m in enumerate(mods):
            x = t[r]
            dx = m.d(x[0], x[1])
            if dx:
                coef = fld.one if acc_deg % 2 == 0 else fld.neg(fld.one)
                vecs = [{t[q]: fld.one} for q in range(len(t))]
                vecs[r] = {(x[0] + 1, i): y for i, y in dx.items()}
                terms.append((coef, vecs))
            acc_deg += x[0]
        return terms

    def _check_d_stable(self):
        fld = self.field
        for deg, ech in self._ech.items():
            tdeg = deg + 1
            for row in ech.rows.values():
                img: dict = {}
                for k, x in row.items():
                    t = self.ambient[deg][k]
                    for coef, vecs in self._tuple_d(t):
                        for items in itertools.product(*[list(v.items()) for v in vecs]):
                            c = fld.mul(x, coef)
                            for _, y in items:
                                c = fld.mul(c, y)
                            kk = self.amb_index.get(tdeg, {}).get(tuple(key for key, _ in items))
                            if kk is not None:
                                img[kk] = fld.add(img.get(kk, fld.zero), c)
                if tdeg in self._ech:
                    img = self._ech[tdeg].reduce(img)
                if any(v != 0 for v in img.values()):
                    raise TensorError(f"tensor relations of {self.name} are not closed under d in degree {deg}")

    def _compute(self, key) -> list[dict]:
        fld = self.field
        out = []
        if key[0] == "d":
            deg = key[1]
            for j in range(self.dim(deg)):
                acc: dict = {}
                for coef, vecs in self._tuple_d(self.lift(deg, j)):
                    vec_add(fld, acc, self.project_combo(vecs), coef)
                out.append({i: x for (_, i), x in acc.items()})
            return out
        slot, deg, a = key
        da = self.algebra.degrees[a]
        for j in range(self.dim(deg)):
            t = self.lift(deg, j)
            vecs = [{x: fld.one} for x in t]
            if slot == RIGHT:
                p = t[-1]
                vecs[-1] = {(p[0] + da, i): y for i, y in self.label.act(RIGHT, a, p[0], p[1]).items()}
                sgn = 0
            else:
                owner = self.slot_owner[slot]
                if owner[0] == "free":
                    p = t[-1]
                    vecs[-1] = {(p[0] + da, i): y for i, y in self.label.act(owner[1], a, p[0], p[1]).items()}
                    sgn = da * sum(x[0] for x in t[:-1])
                else:
                    r, s = owner[1], owner[2]
                    c = t[r]
                    m = self.kids[r][1]
                    vecs[r] = {(c[0] + da, i): y for i, y in m.act(s, a, c[0], c[1]).items()}
                    sgn = da * sum(x[0] for x in t[:r])
            res = self.project_combo(vecs)
            if sgn % 2:
                res = {k: fld.neg(x) for k, x in res.items()}
            out.append({i: x for (_, i), x in res.items()})
        return out


class TreeEngine:
    """Builds and memoizes tree modules over a fixed set of labelled modules."""

    def __init__(self, algebra: DgAlgebra, labels: Mapping[str, NFoldBimodule],
                 sign: TensorSign = TensorSign.SWAP, *, use_weights: bool = True,
                 check_differential: bool = True):
        self.algebra = algebra
        self.field: Field = algebra.field
        self.labels = dict(labels)
        for name, m in self.labels.items():
            if m.algebra is not algebra:
                raise ValueError(f"module {name!r} lives over a different algebra")
        if "I" not in self.labels:
            self.labels["I"] = identity_bimodule(algebra)
        self.sign = sign
        self.use_weights = use_weights
        self.check_differential = check_differential
        self._mods: dict = {}

    def module(self, tree) -> TreeModule:
        if isinstance(tree, Leaf):
            raise ValueError("a bare leaf has no module")
        key = shape(tree)
        m = self._mods.get(key)
        if m is None:
            m = TreeModule(self, key)
            self._mods[key] = m
        return m

    def is_identity_label(self, label: str) -> bool:
        m = self.labels.get(label)
        return m is not None and m.n_left == 1 and getattr(m, "algebra_position", None) is not None

    def relabel(self, tree, mapping: Mapping[str, str]):
        """Identity map ``M(tree) -> M(tree')`` after renaming labels that
        denote the same module; returns ``(tree', morphism)``."""
        def ren(t):
            if isinstance(t, Leaf):
                return t
            return Node(mapping.get(t.label, t.label), tuple(ren(c) for c in t.children))

        for a, b in mapping.items():
            if self.labels[a] is not self.labels[b]:
                raise ValueError(f"labels {a!r} and {b!r} name different modules")
        new = ren(tree)
        return new, self.flat_map(tree, new, 0, lambda atoms: [(self.field.one, atoms)])

    # -- maps on flat tuples ----------------------------------------------
    def flat_map(self, src_tree, tgt_tree, degree: int,
                 fn: Callable[[tuple], Iterable[tuple[object, tuple]]]) -> Morphism:
        """Morphism ``M(src) -> M(tgt)`` induced by a map on flat tuples.

        ``fn(atoms)`` yields ``(coef, new_atoms)`` pairs.
        """
        fld = self.field
        src, tgt = self.module(src_tree), self.module(tgt_tree)
        blocks = {}
        for deg in src.degrees():
            cols = []
            for j in range(src.dim(deg)):
                acc: dict = {}
                for coef, atoms in fn(src.flat(deg, j)):
                    if coef != 0:
                        vec_add(fld, acc, tgt.project_flat(atoms), coef)
                cols.append({i: x for (_, i), x in acc.items()})
            blocks[deg] = cols
        return Morphism(src, tgt, degree, blocks, slot_perm(src_tree, tgt_tree))

    def apply_at(self, f: Morphism, pattern_src, pattern_tgt, tree, addr: Sequence[int] = ()):
        """Apply ``f: M(pattern_src) -> M(pattern_tgt)`` at node ``addr`` of ``tree``.

        The pattern's leaves match whole subtrees (blocks) of ``tree``; the
        result is ``(target_tree, morphism)``.  Signs follow the Koszul rule
        for separating the blocks from the pattern atoms.
        """
        fld = self.field
        addr = tuple(addr)
        sub = subtree(tree, addr)
        blocks: dict[int, object] = {}

        def match(p, t):
            if isinstance(p, Leaf):
                if p.var in blocks and blocks[p.var] != t:
                    raise ValueError("pattern variable used twice")
                blocks[p.var] = t
                return
            if not isinstance(t, Node) or t.label != p.label or len(t.children) != len(p.children):
                raise ValueError(f"pattern {p} does not match {t}")
            for pc, tc in zip(p.children, t.children):
                match(pc, tc)

        match(pattern_src, sub)
        new_sub = substitute(pattern_tgt, blocks)
        tgt_tree = replace(tree, addr, new_sub)
        if self.module(pattern_src) is not f.source or self.module(pattern_tgt) is not f.target:
            raise ValueError("morphism does not match the pattern trees")

        def items(p):
            out = []
            counter = [0]

            def walk(q):
                if isinstance(q, Leaf):
                    out.extend(("B", q.var, k) for k in range(atom_count(blocks[q.var])))
                    return
                for c in q.children:
                    walk(c)
                out.append(("P", counter[0]))
                counter[0] += 1

            walk(p)
            return out

        src_items = items(pattern_src)
        tgt_items = items(pattern_tgt)
        src_leaves = leaves(pattern_src)
        sep_src = [("B", v, k) for v in src_leaves for k in range(atom_count(blocks[v]))]
        n_p = atom_count(pattern_src)
        sep_src += [("P", k) for k in range(n_p)]
        pos_src = {it: i for i, it in enumerate(src_items)}
        to_sep = [pos_src[it] for it in sep_src]
        n_pp = atom_count(pattern_tgt)
        mid = [("B", v, k) for v in src_leaves for k in range(atom_count(blocks[v]))] + [("P", k) for k in range(n_pp)]
        pos_mid = {it: i for i, it in enumerate(mid)}
        to_tgt = [pos_mid[it] for it in tgt_items]
        start, end = atom_span(tree, addr)
        n_blocks = len(sep_src) - n_p
        psrc, ptgt = f.source, f.target
        fdeg = f.degree

        def fn(atoms):
            sub_atoms = atoms[start:end]
            degs = [a[0] for a in sub_atoms]
            par = koszul_sign(degs, to_sep)
            sep = [sub_atoms[i] for i in to_sep]
            blk = sep[:n_blocks]
            before = sum(a[0] for a in atoms[:start]) + sum(a[0] for a in blk)
            par ^= (fdeg * before) % 2
            vec = psrc.project_flat(tuple(sep[n_blocks:]))
            result = []
            for beta, x in vec.items():
                for i, y in f.column(beta[0], beta[1]).items():
                    patoms = ptgt.flat(beta[0] + fdeg, i)
                    midl = blk + list(patoms)
                    mdegs = [a[0] for a in midl]
                    par2 = par ^ koszul_sign(mdegs, to_tgt)
                    new = atoms[:start] + tuple(midl[k] for k in to_tgt) + atoms[end:]
                    c = fld.mul(x, y)
                    result.append((c if par2 == 0 else fld.neg(c), new))
            return result

        return tgt_tree, self.flat_map(tree, tgt_tree, fdeg, fn)

    def remove_identity(self, tree, addr: Sequence[int]):
        """Isomorphism contracting the identity-bimodule node at ``addr``.

        ``Id(B)`` is replaced by ``B``: the algebra element acts on the root
        of ``B`` from the right, or, when ``B`` is a leaf, on the parent atom
        from the left in that slot.
        """
        fld = self.field
        addr = tuple(addr)
        node = subtree(tree, addr)
        if not isinstance(node, Node) or not self.is_identity_label(node.label):
            raise ValueError(f"no identity node at {addr}")
        id_elem = {v: k for k, v in self.labels[node.label].algebra_position.items()}
        child = node.children[0]
        tgt_tree = replace(tree, addr, child)
        start, end = atom_span(tree, addr)
        q = end - 1  # position of the identity atom
        labels = postorder_labels(tree)
        if isinstance(child, Node):
            root_mod = self.labels[child.label]

            def fn(atoms):
                a = id_elem[atoms[q]]
                b = atoms[q - 1]
                out = []
                for i, y in root_mod.act(RIGHT, a, b[0], b[1]).items():
                    new = atoms[:q - 1] + ((b[0] + atoms[q][0], i),) + atoms[q + 1:]
                    out.append((y, new))
                return out
        else:
            if not addr:
                raise ValueError("cannot remove an identity node sitting on a bare leaf at the root")
            parent_addr, slot = addr[:-1], addr[-1] + 1
            _, pend = atom_span(tree, parent_addr)
            r = pend - 1
            parent_mod = self.labels[labels[r]]

            def fn(atoms):
                e = atoms[q]
                a = id_elem[e]
                p = atoms[r]
                between = sum(x[0] for x in atoms[q + 1:r])
                sgn = (e[0] * between) % 2
                out = []
                for i, y in parent_mod.act(slot, a, p[0], p[1]).items():
                    new = atoms[:q] + atoms[q + 1:r] + ((p[0] + e[0], i),) + atoms[r + 1:]
                    out.append((y if not sgn else fld.neg(y), new))
                return out

        return tgt_tree, self.flat_map(tree, tgt_tree, 0, fn)


# -- public tensor operations ------------------------------------------------

def _engine_for(m: NFoldBimodule, n: NFoldBimodule, sign: TensorSign) -> TreeEngine:
    if m.algebra is not n.algebra:
        raise ValueError("algebra mismatch")
    return TreeEngine(m.algebra, {"m": m, "n": n}, sign)


def tensor_over_algebra(m: NFoldBimodule, x: NFoldBimodule, slot: int,
                        sign: TensorSign = TensorSign.SWAP) -> TreeModule:
    """Contract the right module ``x`` into the ``slot``-th left action of ``m``."""
    if x.n_left != 0:
        raise ValueError("x must be a right module (n_left = 0)")
    return tensor_bimodules(m, x, slot, sign)


def tensor_bimodules(m: NFoldBimodule, n: NFoldBimodule, slot: int,
                     sign: TensorSign = TensorSign.SWAP) -> TreeModule:
    """Contract ``n``'s right action against ``m``'s ``slot``-th left action.

    The result's left slots are ``m``'s remaining slots with ``n``'s slots
    spliced in at position ``slot``.
    """
    if not 1 <= slot <= m.n_left:
        raise ValueError(f"slot {slot} out of range 1..{m.n_left}")
    eng = _engine_for(m, n, sign)
    var = itertools.count()
    inner = Node("n", tuple(Leaf(next(var)) for _ in range(n.n_left)))
    kids = []
    for i in range(1, m.n_left + 1):
        kids.append(inner if i == slot else Leaf(next(var)))
    return eng.module(Node("m", tuple(kids)))


def idempotent_contract(m: NFoldBimodule, slot: int, idem, sign: TensorSign = TensorSign.SWAP) -> TreeModule:
    """``m`` with ``idem * A`` contracted into ``slot`` (evaluation on a representable)."""
    A = m.algebra
    fld = A.field
    e = A.element(idem) if not isinstance(idem, dict) else {A.index(k): fld.coerce(v) for k, v in idem.items()}
    if any(A.degrees[k] != 0 for k in e):
        raise ValueError("idempotent must have degree 0")
    if A.mul(e, e) != {k: v for k, v in e.items() if v != 0}:
        raise ValueError("element is not idempotent")
    x = right_ideal(A, e)
    return tensor_over_algebra(m, x, slot, sign)
