"""Classical Davydov-Yetter cohomology of pointed categories.

For a skeletal category whose simple objects form a finite group, every
natural transformation ``X1 x ... x Xn -> X1 x ... x Xn`` is a scalar on
each tuple of simples, so the degree-``n`` cochains are functions on
``G^n``.  Scalar components commute with the associator padding, so the
differential is the alternating sum

    (df)(g1..g_{n+1}) = f(g2..g_{n+1}) + sum_i (-1)^i f(.., g_i g_{i+1}, ..)
                        + (-1)^{n+1} f(g1..gn)

whatever the 3-cocycle ``omega``.  :func:`bar_oracle` recomputes the
same numbers from the normalized bar complex through a separate code path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .complexes import CohomologyReport
from .errors import ValidationError
from .exactfield import Field, Matrix, field_from_name, sparse_rank


class GroupTableError(ValidationError):
    pass


def check_group_table(table: Sequence[Sequence[int]]) -> list[str]:
    """Every violated group axiom; identity must be index 0."""
    n = len(table)
    problems = []
    if n == 0:
        return ["empty table"]
    for a, row in enumerate(table):
        if len(row) != n:
            problems.append(f"row {a} has length {len(row)}, expected {n}")
            return problems
        for b, c in enumerate(row):
            if not (isinstance(c, int) and 0 <= c < n):
                problems.append(f"entry ({a},{b}) = {c!r} is not an index in 0..{n - 1}")
    if problems:
        return problems
    for a in range(n):
        if table[0][a] != a or table[a][0] != a:
            problems.append(f"index 0 is not a two-sided identity (fails at {a})")
            break
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            problems.append(f"not associative at triple ({a}, {b}, {c})")
            break
    for a in range(n):
        if not any(table[a][b] == 0 and table[b][a] == 0 for b in range(n)):
            problems.append(f"element {a} has no inverse")
    return problems


def parse_group_table(text: str) -> list[list[int]]:
    """First line the order ``n``, then ``n`` lines of ``n`` 0-based indices."""
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty group table")
    try:
        n = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"group table is not made of integers: {exc}") from None
    if len(lines[0]) != 1 or len(rows) != n:
        raise ValueError(f"expected the order on the first line and {n} rows, got {len(rows)}")
    return rows


def format_group_table(table: Sequence[Sequence[int]]) -> str:
    return "\n".join([str(len(table))] + [" ".join(map(str, r)) for r in table]) + "\n"


def cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def symmetric3_table() -> list[list[int]]:
    """Permutations of three points, identity first, composed left to right."""
    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    return [[index[tuple(q[p[i]] for i in range(3))] for q in perms] for p in perms]


GROUPS: dict[str, Callable[[], list[list[int]]]] = {
    "trivial": lambda: cyclic_table(1),
    "z2": lambda: cyclic_table(2),
    "z3": lambda: cyclic_table(3),
    "z4": lambda: cyclic_table(4),
    "s3": symmetric3_table,
}


def group_table(name: str) -> list[list[int]]:
    key = name.lower().replace("/", "").replace("-", "")
    if key in GROUPS:
        return GROUPS[key]()
    if key.startswith("z") and key[1:].isdigit():
        return cyclic_table(int(key[1:]))
    raise KeyError(f"unknown group {name!r}; known: {', '.join(GROUPS)}")


class PointedFusionData:
    """A finite group with a 3-cocycle ``omega`` over a field.

    ``omega`` maps triples of indices to nonzero scalars; missing triples
    count as one.  The table and the cocycle condition are checked
    exhaustively.
    """

    def __init__(self, table: Sequence[Sequence[int]], field: Field | str, omega=None, name: str = "G"):
        self.field = field_from_name(field) if isinstance(field, str) else field
        self.table = [list(r) for r in table]
        self.order = len(self.table)
        self.name = name
        problems = check_group_table(self.table)
        if problems:
            raise GroupTableError("invalid group table: " + "; ".join(problems))
        self._omega = omega
        bad = self.cocycle_defect()
        if bad is not None:
            raise ValidationError(f"omega is not a 3-cocycle at {bad}")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def omega(self, a: int, b: int, c: int):
        f = self.field
        w = self._omega
        if w is None:
            return f.one
        x = w(a, b, c) if callable(w) else w.get((a, b, c), f.one)
        x = f.coerce(x)
        if x == 0:
            raise ValidationError(f"omega vanishes at ({a}, {b}, {c})")
        return x

    def cocycle_defect(self):
        """A quadruple where the pentagon for ``omega`` fails, or ``None``."""
        if self._omega is None:
            return None
        f, m, w = self.field, self.mul, self.omega
        for a, b, c, d in itertools.product(range(self.order), repeat=4):
            lhs = f.mul(f.mul(w(b, c, d), w(a, m(b, c), d)), w(a, b, c))
            rhs = f.mul(w(m(a, b), c, d), w(a, b, m(c, d)))
            if lhs != rhs:
                return (a, b, c, d)
        return None

    def relabel(self, perm: Sequence[int]) -> "PointedFusionData":
        """The same group with element ``i`` renamed ``perm[i]`` (``perm[0] = 0``)."""
        inv = {p: i for i, p in enumerate(perm)}
        t = [[perm[self.table[inv[a]][inv[b]]] for b in range(self.order)] for a in range(self.order)]
        om = None
        if self._omega is not None:
            om = lambda a, b, c: self.omega(inv[a], inv[b], inv[c])  # noqa: E731
        return PointedFusionData(t, self.field, om, self.name)

    def __repr__(self):
        return f"PointedFusionData({self.name}, order={self.order}, {self.field})"


@dataclass
class ClassicalDYComplex:
    """Cochains ``k^{G^n}`` for ``0 <= n <= max_n`` with sparse differentials.

    ``columns[n][j]`` is the image of the ``j``-th indicator function of
    ``G^n`` (lexicographic order) as a dict on ``G^{n+1}``.
    """

    data: PointedFusionData
    max_n: int
    columns: dict[int, list[dict]]

    @property
    def field(self) -> Field:
        return self.data.field

    def dim(self, n: int) -> int:
        return self.data.order ** n if 0 <= n <= self.max_n else 0

    def matrix(self, n: int) -> Matrix:
        """Dense ``d^n``; only sensible for small groups and degrees."""
        return Matrix.from_columns(self.field, self.dim(n + 1),
                                   [[c.get(i, self.field.zero) for i in range(self.dim(n + 1))]
                                    for c in self.columns.get(n, [])])

    def rank(self, n: int) -> int:
        if n < 0 or n not in self.columns:
            return 0
        return sparse_rank(self.field, self.columns[n])

    def check_square(self, n: int) -> bool:
        """``d^{n+1} d^n = 0`` on every basis cochain."""
        f = self.field
        nxt = self.columns.get(n + 1)
        if nxt is None:
            return True
        for col in self.columns.get(n, []):
            acc: dict = {}
            for i, x in col.items():
                for k, y in nxt[i].items():
                    acc[k] = f.add(acc.get(k, f.zero), f.mul(x, y))
            if any(v != 0 for v in acc.values()):
                return False
        return True


def _index(t: Sequence[int], q: int) -> int:
    i = 0
    for a in t:
        i = i * q + a
    return i


def build_classical(pfd: PointedFusionData, max_n: int) -> ClassicalDYComplex:
    """The cochain complex with differentials ``d^n`` for ``n < max_n``."""
    if max_n < 0:
        raise ValueError("max_n must be non-negative")
    f, q, m = pfd.field, pfd.order, pfd.mul
    one, neg = f.one, f.neg(f.one)
    cols: dict[int, list[dict]] = {}
    for n in range(max_n):
        out = []
        # image of the indicator of (h1..hn): collect every (g1..g_{n+1}) it sees
        pre: list[dict] = [dict() for _ in range(q ** n)]
        for g in itertools.product(range(q), repeat=n + 1):
            row = _index(g, q)
            terms = [(g[1:], one)]
            for i in range(1, n + 1):
                merged = g[:i - 1] + (m(g[i - 1], g[i]),) + g[i + 1:]
                terms.append((merged, one if i % 2 == 0 else neg))
            terms.append((g[:n], one if (n + 1) % 2 == 0 else neg))
            for h, c in terms:
                col = pre[_index(h, q)]
                v = f.add(col.get(row, f.zero), c)
                if v == 0:
                    col.pop(row, None)
                else:
                    col[row] = v
        out.extend(pre)
        cols[n] = out
    return ClassicalDYComplex(pfd, max_n, cols)


def hdy_classical(pfd: PointedFusionData, max_n: int) -> CohomologyReport:
    """Betti numbers in degrees ``0..max_n - 1``; the top degree ``max_n`` is
    reported too but flagged, since ``d^{max_n}`` was not built."""
    dy = build_classical(pfd, max_n)
    ranks = {n: dy.rank(n) for n in range(max_n)}
    betti = {n: dy.dim(n) - ranks.get(n, 0) - ranks.get(n - 1, 0) for n in range(max_n + 1)}
    return CohomologyReport(pfd.field, betti, {}, frozenset([max_n]))


def _normalized_bar(table: Sequence[Sequence[int]], fld: Field, n: int) -> list[dict]:
    """``delta^n`` on normalized cochains (functions on ``(G \\ {e})^n``).

    Columns are indexed by tuples of non-identity elements; a product that
    hits the identity leaves the normalized subcomplex and is dropped,
    since normalized cochains vanish there.
    """
    q = len(table)
    nontriv = list(range(1, q))
    pos = {t: i for i, t in enumerate(itertools.product(nontriv, repeat=n))}
    rows = {t: i for i, t in enumerate(itertools.product(nontriv, repeat=n + 1))}
    cols = [dict() for _ in pos]
    for g, r in rows.items():
        faces = [(g[1:], 1)]
        for i in range(n):
            prod = table[g[i]][g[i + 1]]
            if prod != 0:
                faces.append((g[:i] + (prod,) + g[i + 2:], (-1) ** (i + 1)))
        faces.append((g[:n], (-1) ** (n + 1)))
        for h, s in faces:
            c = cols[pos[h]]
            v = fld.add(c.get(r, fld.zero), fld.coerce(s))
            if v == 0:
                c.pop(r, None)
            else:
                c[r] = v
    return cols


def bar_oracle(table: Sequence[Sequence[int]], field: Field | str, max_n: int) -> CohomologyReport:
    """Group cohomology with trivial coefficients, degrees ``0..max_n - 1``
    (``max_n`` flagged), from the normalized inhomogeneous bar complex."""
    fld = field_from_name(field) if isinstance(field, str) else field
    problems = check_group_table(table)
    if problems:
        raise GroupTableError("invalid group table: " + "; ".join(problems))
    q = len(table)
    dims = {n: (q - 1) ** n for n in range(max_n + 1)}
    rk = {n: sparse_rank(fld, _normalized_bar(table, fld, n)) if dims[n] and dims[n + 1] else 0
          for n in range(max_n)}
    betti = {n: dims[n] - rk.get(n, 0) - rk.get(n - 1, 0) for n in range(max_n + 1)}
    return CohomologyReport(fld, betti, {}, frozenset([max_n]))


def classical_fixture(name: str, field: Field | str) -> PointedFusionData:
    return PointedFusionData(group_table(name), field, name=name)


__all__ = [
    "GroupTableError", "check_group_table", "parse_group_table", "format_group_table", "cyclic_table",
    "symmetric3_table", "GROUPS", "group_table", "PointedFusionData", "ClassicalDYComplex",
    "build_classical", "hdy_classical", "bar_oracle", "classical_fixture",
]
