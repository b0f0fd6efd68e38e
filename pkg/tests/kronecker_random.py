"""Random small dg-bimodules over the Kronecker algebra.

A module is built as a tensor product over the ground field of random
quiver representations, one left representation per slot and one right
representation.  Each summand sits in a single degree, optionally paired
with a shifted copy joined by an identity differential.
"""

from __future__ import annotations

import random

from dgdy.dgcore import NFoldBimodule
from dgdy.exactfield import Matrix
from dgdy.fixtures import kronecker_algebra


def _kron(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def _eye(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _rep(rng: random.Random, left: bool, p: int | None = None):
    """A Kronecker representation as full action matrices on ``V0 + V1``.

    Right modules: arrows act ``V0 -> V1``.  Left modules: ``V1 -> V0``.
    """
    d0, d1 = rng.randint(0, 2), rng.randint(0, 2)
    if d0 + d1 == 0:
        d0 = 1
    n = d0 + d1
    lo = -2 if p is None else 0
    hi = 2 if p is None else p - 1
    acts = {"e0": [[int(i == j and i < d0) for j in range(n)] for i in range(n)],
            "e1": [[int(i == j and i >= d0) for j in range(n)] for i in range(n)]}
    for arrow in ("x", "y"):
        m = [[0] * n for _ in range(n)]
        for i in range(d0):
            for j in range(d1):
                if left:
                    m[i][d0 + j] = rng.randint(lo, hi)
                else:
                    m[d0 + j][i] = rng.randint(lo, hi)
        acts[arrow] = m
    return n, acts


def random_bimodule(rng: random.Random, fld, n_left: int, A=None, *, p: int | None = None) -> NFoldBimodule:
    A = A if A is not None else kronecker_algebra(fld)
    names = list(A.names)
    dims: dict[int, int] = {}
    blocks = []  # (degree, offset, size, per-slot actions)
    links = []  # identity differentials between a block and its shifted copy
    for _ in range(rng.randint(1, 2)):
        factors = [_rep(rng, True, p) for _ in range(n_left)] + [_rep(rng, False, p)]
        sizes = [f[0] for f in factors]
        size = 1
        for s in sizes:
            size *= s
        # action of slot k: identity on the other factors; slot 0 is the right action
        order = [n_left] + list(range(n_left))
        acts = []
        for k in order:
            per = {}
            for a in names:
                mat = [[1]]
                for idx, (sz, fa) in enumerate(factors):
                    mat = _kron(mat, fa[a] if idx == k else _eye(sz))
                per[a] = mat
            acts.append(per)
        deg = rng.randint(-1, 1)
        paired = rng.random() < 0.3
        lo_off = dims.get(deg, 0)
        dims[deg] = lo_off + size
        blocks.append((deg, lo_off, size, acts))
        if paired:
            hi_off = dims.get(deg + 1, 0)
            dims[deg + 1] = hi_off + size
            blocks.append((deg + 1, hi_off, size, acts))
            links.append((deg, lo_off, hi_off, size))
    right: dict = {}
    left: list[dict] = [dict() for _ in range(n_left)]

    def place(table, deg, off, size, mat):
        full = table.setdefault(deg, [[0] * dims[deg] for _ in range(dims[deg])])
        for i in range(size):
            for j in range(size):
                full[off + i][off + j] += mat[i][j]

    raw_actions: list[dict] = [dict() for _ in range(n_left + 1)]
    for deg, off, size, acts in blocks:
        for slot in range(n_left + 1):
            for a in names:
                place(raw_actions[slot].setdefault(a, {}), deg, off, size, acts[slot][a])
    diff: dict = {}
    for deg, lo_off, hi_off, size in links:
        mat = diff.setdefault(deg, [[0] * dims[deg] for _ in range(dims[deg + 1])])
        for i in range(size):
            mat[hi_off + i][lo_off + i] = 1
    for slot in range(n_left + 1):
        table = right if slot == 0 else left[slot - 1]
        for a, per_deg in raw_actions[slot].items():
            for deg, rows in per_deg.items():
                table[(deg, a)] = Matrix.from_rows(fld, rows)
    dmats = {deg: Matrix.from_rows(fld, rows) for deg, rows in diff.items()}
    return NFoldBimodule(A, n_left, dims, dmats, right, left, name="R")
