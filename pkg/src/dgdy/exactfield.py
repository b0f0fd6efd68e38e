"""Exact scalars and dense matrices over Q and F_p.

Every routine here is exact; there is no floating point anywhere in the
package.  Raw scalar values are :class:`fractions.Fraction` for Q and plain
``int`` residues in ``[0, p)`` for F_p.  :class:`FieldScalar` wraps a raw
value together with its field for the public API, while the heavy lifting
(modules, Hom systems, DY complexes) works on raw values through the
:class:`Field` object to avoid per-entry wrapper overhead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence


class FieldMismatch(TypeError):
    """Raised when scalars or matrices over different fields are combined."""


class Field:
    """Arithmetic on raw scalar values of one exact field."""

    name: str
    characteristic: int

    zero: object
    one: object

    def coerce(self, x) -> object:
        raise NotImplementedError

    def parse(self, text: str) -> object:
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def inv(self, x) -> object:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def __call__(self, x) -> "FieldScalar":
        return FieldScalar(self.coerce(x), self)

    def __repr__(self) -> str:
        return self.name


class Rationals(Field):
    name = "Q"
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, FieldScalar):
            if x.field is not self:
                raise FieldMismatch(f"cannot coerce {x.field} scalar into Q")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, float):
            raise TypeError("floating point values are not accepted")
        return Fraction(x)

    _pattern = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")

    def parse(self, text: str):
        m = self._pattern.match(text)
        if m is None:
            raise ValueError(f"not a rational: {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(num, den)

    def format(self, x) -> str:
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class PrimeField(Field):
    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def coerce(self, x):
        if isinstance(x, FieldScalar):
            if x.field is not self:
                raise FieldMismatch(f"cannot coerce {x.field} scalar into {self.name}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        if isinstance(x, float):
            raise TypeError("floating point values are not accepted")
        return int(x) % self.p

    def parse(self, text: str):
        text = text.strip()
        if not re.fullmatch(r"\d+", text):
            raise ValueError(f"not a residue: {text!r}")
        v = int(text)
        if v >= self.p:
            raise ValueError(f"residue {v} outside [0, {self.p - 1}]")
        return v

    def format(self, x) -> str:
        return str(x)

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def __reduce__(self):
        return (GF, (self.p,))


QQ = Rationals()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    """The prime field with ``p`` elements (validated and cached)."""
    return PrimeField(p)


def field_from_name(name: str) -> Field:
    """Parse ``"Q"`` or ``"Fp"`` (e.g. ``"F5"``)."""
    name = name.strip()
    if name in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"(?:F|GF)\(?(\d+)\)?", name)
    if m:
        return GF(int(m.group(1)))
    raise ValueError(f"unknown field {name!r}; use Q or Fp with p prime")


@dataclass(frozen=True)
class FieldScalar:
    """An element of Q or F_p."""

    value: object
    field: Field

    def __post_init__(self):
        if isinstance(self.field, Rationals):
            if not isinstance(self.value, Fraction):
                object.__setattr__(self, "value", Fraction(self.value))
        else:
            if not isinstance(self.value, int) or not 0 <= self.value < self.field.p:
                object.__setattr__(self, "value", self.field.coerce(self.value))

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field is not self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field.add(self.value, o), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field.sub(self.value, o), self.field)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field.sub(o, self.value), self.field)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field.mul(self.value, o), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldScalar(self.field.div(self.value, o), self.field)

    def __neg__(self):
        return FieldScalar(self.field.neg(self.value), self.field)

    def inverse(self) -> "FieldScalar":
        return FieldScalar(self.field.inv(self.value), self.field)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.name, self.value))

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"FieldScalar({self.field.format(self.value)}, {self.field.name})"


# ---------------------------------------------------------------------------
# row reduction kernels on raw values


def _rref_rows(field: Field, rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of ``rows`` (consumed).  Returns (rows, pivots)."""
    if isinstance(field, Rationals):
        return _rref_rational(rows, ncols)
    p = field.p
    rows = [r for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        prow = [(x * inv) % p for x in rows[r]]
        rows[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    for j in nz:
                        row[j] = (row[j] - f * prow[j]) % p
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if x:
                den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def _rref_rational(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    # Fraction-free Gauss-Jordan on primitive integer rows; divide once at the end.
    ints = [_primitive(r) for r in _integer_rows(rows) if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        best = None
        for i in range(r, len(ints)):
            v = ints[i][c]
            if v and (best is None or abs(v) < best):
                piv, best = i, abs(v)
                if best == 1:
                    break
        if piv is None:
            continue
        ints[r], ints[piv] = ints[piv], ints[r]
        prow = ints[r]
        a = prow[c]
        nz = [j for j in range(ncols) if prow[j]]
        for i in range(len(ints)):
            if i == r:
                continue
            b = ints[i][c]
            if b:
                g = gcd(a, b)
                fa, fb = a // g, b // g
                row = ints[i]
                for j in range(ncols):
                    row[j] *= fa
                for j in nz:
                    row[j] -= fb * prow[j]
                ints[i] = _primitive(row)
        pivots.append(c)
        r += 1
        if r == len(ints):
            break
    out = []
    for i, c in enumerate(pivots):
        a = ints[i][c]
        out.append([Fraction(x, a) for x in ints[i]])
    return out, pivots


def bareiss_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    """Rank of an integer matrix by Bareiss fraction-free elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        a = m[rank][c]
        for i in range(rank + 1, nrows):
            b = m[i][c]
            row = m[i]
            prow = m[rank]
            for j in range(c + 1, ncols):
                row[j] = (a * row[j] - b * prow[j]) // prev
            row[c] = 0
        prev = a
        rank += 1
        if rank == nrows:
            break
    return rank


# ---------------------------------------------------------------------------
# sparse incremental echelon (internal workhorse for large systems)


class SparseEchelon:
    """Incrementally maintained reduced echelon basis of sparse row vectors.

    Rows are dicts ``{column: value}`` with raw field values.  Each stored
    row has a pivot column with coefficient one and no other stored row has
    a nonzero entry there, so reduction is a single pass and the free
    columns give a canonical nullspace basis.
    """

    def __init__(self, field: Field):
        self.field = field
        self.rows: dict[int, dict] = {}
        self._occ: dict[int, set] = {}  # column -> pivots of rows touching it

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        f = self.field
        v = {k: x for k, x in vec.items() if x != 0}
        rows = self.rows
        for c in [k for k in v if k in rows]:
            coef = v.get(c)
            if not coef:
                continue
            for k, x in rows[c].items():
                nv = f.sub(v.get(k, f.zero), f.mul(coef, x))
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; return True when it was independent."""
        f = self.field
        v = self.reduce(vec)
        if not v:
            return False
        c = min(v)
        inv = f.inv(v[c])
        v = {k: f.mul(x, inv) for k, x in v.items()}
        occ = self._occ
        for pc in list(occ.get(c, ())):
            row = self.rows[pc]
            coef = row[c]
            for k, x in v.items():
                old = row.get(k)
                nv = f.sub(old if old is not None else f.zero, f.mul(coef, x))
                if nv == 0:
                    if old is not None:
                        del row[k]
                        occ[k].discard(pc)
                else:
                    row[k] = nv
                    if old is None:
                        occ.setdefault(k, set()).add(pc)
        self.rows[c] = v
        for k in v:
            if k != c:
                occ.setdefault(k, set()).add(c)
        return True

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def nullspace(self, ncols: int) -> list[dict]:
        """Basis of the solutions of ``row . x = 0`` for all stored rows.

        Vector ``i`` has a one at the ``i``-th free column and zeros at all
        other free columns.
        """
        f = self.field
        piv = self.rows
        basis = []
        for free in range(ncols):
            if free in piv:
                continue
            vec = {free: f.one}
            for pc in sorted(self._occ.get(free, ())):
                vec[pc] = f.neg(piv[pc][free])
            basis.append(vec)
        return basis


def sparse_rank(field: Field, columns: Iterable[dict]) -> int:
    """Rank of a matrix given by sparse columns (dicts row -> value).

    Uses eager pivoting on the sparsest available entry to keep fill-in low,
    which matters for bar-complex style incidence matrices.
    """
    ech = _PivotingEliminator(field)
    for col in columns:
        ech.add(col)
    return ech.rank


class _PivotingEliminator:
    # Forward elimination only: each stored vector has a distinct leading key
    # and we reduce new vectors against the stored ones by leading key.
    def __init__(self, field: Field):
        self.field = field
        self.lead: dict[int, dict] = {}
        self.rank = 0

    def add(self, vec: dict) -> bool:
        f = self.field
        v = {k: x for k, x in vec.items() if x != 0}
        lead = self.lead
        if isinstance(f, Rationals):
            # integer arithmetic with primitive normalisation
            v = {k: Fraction(x) for k, x in v.items()}
            den = 1
            for x in v.values():
                den = lcm(den, x.denominator)
            v = {k: int(x * den) for k, x in v.items()}
            while v:
                c = min(v)
                row = lead.get(c)
                if row is None:
                    g = 0
                    for x in v.values():
                        g = gcd(g, x)
                    if g > 1:
                        v = {k: x // g for k, x in v.items()}
                    lead[c] = v
                    self.rank += 1
                    return True
                a = row[c]
                b = v[c]
                g = gcd(a, b)
                fa, fb = a // g, b // g
                nv = {k: x * fa for k, x in v.items()}
                for k, x in row.items():
                    y = nv.get(k, 0) - fb * x
                    if y:
                        nv[k] = y
                    else:
                        nv.pop(k, None)
                v = nv
            return False
        p = f.p
        while v:
            c = min(v)
            row = lead.get(c)
            if row is None:
                inv = pow(v[c], -1, p)
                lead[c] = {k: (x * inv) % p for k, x in v.items()}
                self.rank += 1
                return True
            b = v[c]
            for k, x in row.items():
                y = (v.get(k, 0) - b * x) % p
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        return False


# ---------------------------------------------------------------------------
# dense matrices


class Matrix:
    """Immutable dense matrix over an exact field.

    ``entries`` may be given as nested rows of raw values, ints, strings or
    :class:`FieldScalar` objects; everything is coerced into the field.
    """

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field: Field, rows: int, cols: int, entries=None, *, _raw=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.field = field
        self.rows = rows
        self.cols = cols
        if _raw is not None:
            data = _raw
        elif entries is None:
            data = tuple(tuple(field.zero for _ in range(cols)) for _ in range(rows))
        else:
            entries = list(entries)
            if not entries and rows * cols == 0:
                entries = [[] for _ in range(rows)] if cols == 0 else []
            elif entries and not isinstance(entries[0], (list, tuple)):
                if len(entries) != rows * cols:
                    raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
                entries = [entries[i * cols:(i + 1) * cols] for i in range(rows)]
            if len(entries) != rows or any(len(r) != cols for r in entries):
                raise ValueError("entries do not match the declared shape")
            data = tuple(tuple(field.coerce(x) for x in r) for r in entries)
        self._data = data

    # construction helpers
    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "Matrix":
        rows = list(rows)
        ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, field: Field, nrows: int, columns: Sequence[Sequence]) -> "Matrix":
        columns = list(columns)
        data = tuple(tuple(field.coerce(columns[j][i]) for j in range(len(columns))) for i in range(nrows))
        return cls(field, nrows, len(columns), _raw=data)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        data = tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n))
        return cls(field, n, n, _raw=data)

    @classmethod
    def raw(cls, field: Field, rows: int, cols: int, data) -> "Matrix":
        """Wrap already-coerced raw rows without copying or checking."""
        return cls(field, rows, cols, _raw=tuple(tuple(r) for r in data))

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def raw_rows(self) -> tuple[tuple, ...]:
        return self._data

    def __getitem__(self, ij) -> FieldScalar:
        i, j = ij
        return FieldScalar(self._data[i][j], self.field)

    def column(self, j: int) -> list:
        return [self._data[i][j] for i in range(self.rows)]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        data = tuple(tuple(self._data[i][j] for i in range(self.rows)) for j in range(self.cols))
        return Matrix(self.field, self.cols, self.rows, _raw=data)

    T = property(transpose)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        f = self.field
        data = tuple(tuple(f.add(a, b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data))
        return Matrix(f, self.rows, self.cols, _raw=data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        f = self.field
        data = tuple(tuple(f.sub(a, b) for a, b in zip(r, s)) for r, s in zip(self._data, other._data))
        return Matrix(f, self.rows, self.cols, _raw=data)

    def __neg__(self) -> "Matrix":
        f = self.field
        return Matrix(f, self.rows, self.cols, _raw=tuple(tuple(f.neg(a) for a in r) for r in self._data))

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.coerce(c)
        return Matrix(f, self.rows, self.cols, _raw=tuple(tuple(f.mul(c, a) for a in r) for r in self._data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        f = self.field
        ocols = list(zip(*other._data)) if other.rows else [()] * other.cols
        out = []
        if isinstance(f, Rationals):
            for r in self._data:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append(tuple(sum((a * col[k] for k, a in nz), Fraction(0)) for col in ocols))
        else:
            p = f.p
            for r in self._data:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append(tuple(sum(a * col[k] for k, a in nz) % p for col in ocols))
        return Matrix(f, self.rows, other.cols, _raw=tuple(out))

    def apply(self, vec: Sequence) -> list:
        """Matrix times a raw column vector."""
        f = self.field
        if isinstance(f, Rationals):
            return [sum((a * vec[k] for k, a in enumerate(r) if a), Fraction(0)) for r in self._data]
        return [sum(a * vec[k] for k, a in enumerate(r) if a) % f.p for r in self._data]

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        data = tuple(r + s for r, s in zip(self._data, other._data))
        return Matrix(self.field, self.rows, self.cols + other.cols, _raw=data)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return Matrix(self.field, self.rows + other.rows, self.cols, _raw=self._data + other._data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        data = tuple(tuple(self._data[i][j] for j in cols) for i in rows)
        return Matrix(self.field, len(rows), len(cols), _raw=data)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field is other.field and self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.field.name, self.rows, self.cols, self._data))

    def to_strings(self) -> list[list[str]]:
        return [[self.field.format(x) for x in r] for r in self._data]

    def __repr__(self):
        body = "; ".join(" ".join(r) for r in self.to_strings())
        return f"Matrix[{self.field.name}]({self.rows}x{self.cols}: {body})"


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (deterministic pivoting)."""
    rows, pivots = _rref_rows(m.field, [list(r) for r in m.raw_rows()], m.cols)
    return Matrix(m.field, len(rows), m.cols, _raw=tuple(tuple(r) for r in rows)), pivots


def rank(m: Matrix) -> int:
    """Rank of ``m``; Bareiss over Q, Gaussian elimination over F_p."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if isinstance(m.field, Rationals):
        return bareiss_rank(_integer_rows(m.raw_rows()), m.cols)
    return len(_rref_rows(m.field, [list(r) for r in m.raw_rows()], m.cols)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Matrix whose columns form a basis of ``ker m`` (cols - rank columns)."""
    f = m.field
    rows, pivots = _rref_rows(f, [list(r) for r in m.raw_rows()], m.cols)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [f.zero] * m.cols
        v[free] = f.one
        for r, pc in zip(rows, pivots):
            if r[free]:
                v[pc] = f.neg(r[free])
        basis.append(v)
    data = tuple(tuple(basis[j][i] for j in range(len(basis))) for i in range(m.cols))
    return Matrix(f, m.cols, len(basis), _raw=data)


def cokernel(m: Matrix) -> tuple[Matrix, int]:
    """Projection onto ``coker m`` and its dimension.

    The projection has full row rank ``rows - rank(m)`` and annihilates the
    image of ``m``.  It is the left kernel of ``m``.
    """
    left = kernel_basis(m.transpose())
    proj = left.transpose()
    return proj, proj.rows


def solve(m: Matrix, rhs: Matrix) -> Matrix | None:
    """Some ``x`` with ``m @ x == rhs``, or ``None`` when inconsistent."""
    if m.field is not rhs.field:
        raise FieldMismatch(f"{m.field} vs {rhs.field}")
    if m.rows != rhs.rows:
        raise ValueError(f"dimension mismatch: {m.rows} rows vs rhs {rhs.rows}")
    f = m.field
    aug = m.hstack(rhs)
    rows, pivots = _rref_rows(f, [list(r) for r in aug.raw_rows()], aug.cols)
    if any(pc >= m.cols for pc in pivots):
        return None
    x = [[f.zero] * rhs.cols for _ in range(m.cols)]
    for r, pc in zip(rows, pivots):
        for j in range(rhs.cols):
            x[pc][j] = r[m.cols + j]
    return Matrix(f, m.cols, rhs.cols, _raw=tuple(tuple(r) for r in x))


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("not square")
    x = solve(m, Matrix.identity(m.field, m.rows))
    if x is None or rank(m) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return x
