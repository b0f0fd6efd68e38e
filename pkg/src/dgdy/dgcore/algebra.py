"""Finite-dimensional dg-algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..exactfield import Field, Matrix

Vec = dict  # sparse vector: basis key -> raw field value


def vec_add(fld: Field, acc: dict, vec: Mapping, coef=None) -> dict:
    """``acc += coef * vec`` in place (dropping zeros); returns ``acc``."""
    for k, x in vec.items():
        if coef is not None:
            x = fld.mul(coef, x)
        nv = fld.add(acc.get(k, fld.zero), x)
        if nv == 0:
            acc.pop(k, None)
        else:
            acc[k] = nv
    return acc


def vec_scale(fld: Field, vec: Mapping, coef) -> dict:
    if coef == 0:
        return {}
    return {k: fld.mul(coef, x) for k, x in vec.items()}


@dataclass
class Violation:
    """One failed axiom together with the basis elements witnessing it."""

    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self):
        w = ", ".join(str(x) for x in self.witness)
        s = f"{self.axiom} fails at ({w})"
        return f"{s}: {self.detail}" if self.detail else s


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, axiom: str, witness: tuple, detail: str = ""):
        self.violations.append(Violation(axiom, witness, detail))

    def extend(self, other: "ValidationReport"):
        self.violations.extend(other.violations)

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


class DgAlgebra:
    """A dg-algebra with named homogeneous basis elements.

    ``mult[(i, j)]`` is the product of basis elements ``i`` and ``j`` as a
    sparse vector ``{k: coeff}``; missing pairs multiply to zero.  ``unit``
    and ``diff[i]`` are sparse vectors in the same basis.  Elements can be
    referred to by index or by name.
    """

    def __init__(self, field: Field, names: Sequence[str], degrees: Sequence[int],
                 mult: Mapping[tuple, Mapping], unit: Mapping, diff: Mapping | None = None):
        if len(names) != len(degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise ValueError("basis names must be distinct")
        self.field = field
        self.names = list(names)
        self.degrees = [int(d) for d in degrees]
        self._index = {n: i for i, n in enumerate(self.names)}
        self.mult: dict[tuple[int, int], dict] = {}
        for (a, b), v in mult.items():
            key = (self.index(a), self.index(b))
            vec = self._vec(v)
            if vec:
                self.mult[key] = vec
        self.unit = self._vec(unit)
        self.diff: dict[int, dict] = {}
        for a, v in (diff or {}).items():
            vec = self._vec(v)
            if vec:
                self.diff[self.index(a)] = vec
        self._idempotents: list[int] | None | bool = False

    def _vec(self, v: Mapping) -> dict:
        out = {}
        for k, x in v.items():
            x = self.field.coerce(x)
            if x != 0:
                out[self.index(k)] = self.field.add(out.get(self.index(k), self.field.zero), x)
        return {k: x for k, x in out.items() if x != 0}

    def index(self, a) -> int:
        if isinstance(a, str):
            try:
                return self._index[a]
            except KeyError:
                raise KeyError(f"unknown algebra element {a!r}") from None
        a = int(a)
        if not 0 <= a < len(self.names):
            raise IndexError(f"algebra index {a} out of range")
        return a

    @property
    def dim(self) -> int:
        return len(self.names)

    def degree(self, a) -> int:
        return self.degrees[self.index(a)]

    def mul_basis(self, a: int, b: int) -> dict:
        return self.mult.get((a, b), {})

    def mul(self, u: Mapping, v: Mapping) -> dict:
        fld = self.field
        out: dict = {}
        for a, x in u.items():
            for b, y in v.items():
                prod = self.mult.get((a, b))
                if prod:
                    vec_add(fld, out, prod, fld.mul(x, y))
        return out

    def d(self, u: Mapping) -> dict:
        out: dict = {}
        for a, x in u.items():
            if a in self.diff:
                vec_add(self.field, out, self.diff[a], x)
        return out

    def element(self, a) -> dict:
        return {self.index(a): self.field.one}

    def idempotents(self) -> list[int] | None:
        """A complete family of orthogonal idempotent basis elements, if any.

        Detected automatically: degree-0 basis elements ``e`` with ``e e = e``,
        pairwise orthogonal, summing to the unit and killed by ``d``.  Used
        only to prune linear systems; ``None`` when no such family exists.
        """
        if self._idempotents is not False:
            return self._idempotents
        one = self.field.one
        cands = [i for i in range(self.dim)
                 if self.degrees[i] == 0 and self.mult.get((i, i)) == {i: one} and i not in self.diff]
        fam = None
        if cands and all(not self.mult.get((i, j)) for i in cands for j in cands if i != j):
            if self.unit == {i: one for i in cands}:
                fam = cands
        self._idempotents = fam
        return fam

    def left_matrix(self, a) -> Matrix:
        """Matrix of ``x -> a x`` in the basis."""
        a = self.index(a)
        cols = []
        for b in range(self.dim):
            v = self.mult.get((a, b), {})
            cols.append([v.get(k, self.field.zero) for k in range(self.dim)])
        return Matrix.from_columns(self.field, self.dim, cols)

    def __repr__(self):
        return f"DgAlgebra[{self.field}]({', '.join(self.names)})"


def validate_algebra(a: DgAlgebra) -> ValidationReport:
    """Check associativity, unit, grading, graded Leibniz and ``d^2 = 0``.

    Every violation names the basis elements witnessing it.
    """
    rep = ValidationReport()
    fld = a.field
    n = a.dim
    names = a.names
    for (i, j), v in a.mult.items():
        for k in v:
            if a.degrees[k] != a.degrees[i] + a.degrees[j]:
                rep.add("grading", (names[i], names[j]), f"product has a component {names[k]} of the wrong degree")
                break
    for i, v in a.diff.items():
        for k in v:
            if a.degrees[k] != a.degrees[i] + 1:
                rep.add("grading", (names[i],), f"d has a component {names[k]} of the wrong degree")
                break
    for k in a.unit:
        if a.degrees[k] != 0:
            rep.add("grading", (names[k],), "unit has a component outside degree 0")
    for i in range(n):
        e = {i: fld.one}
        if a.mul(a.unit, e) != e:
            rep.add("unit", (names[i],), "1 * x != x")
        if a.mul(e, a.unit) != e:
            rep.add("unit", (names[i],), "x * 1 != x")
    for i in range(n):
        for j in range(n):
            ij = a.mul_basis(i, j)
            for k in range(n):
                lhs = a.mul(ij, {k: fld.one})
                rhs = a.mul({i: fld.one}, a.mul_basis(j, k))
                if lhs != rhs:
                    rep.add("associativity", (names[i], names[j], names[k]), "(ab)c != a(bc)")
    for i in range(n):
        if a.d(a.d({i: fld.one})):
            rep.add("d^2", (names[i],), f"d(d(a)) != 0 for {names[i]} in degree {a.degrees[i]}")
    if a.d(a.unit):
        rep.add("leibniz", ("1",), "d(1) != 0")
    for i in range(n):
        for j in range(n):
            lhs = a.d(a.mul_basis(i, j))
            rhs = a.mul(a.d({i: fld.one}), {j: fld.one})
            sign = fld.one if a.degrees[i] % 2 == 0 else fld.neg(fld.one)
            vec_add(fld, rhs, a.mul({i: fld.one}, a.d({j: fld.one})), sign)
            if lhs != rhs:
                rep.add("leibniz", (names[i], names[j]), "d(ab) != d(a)b + (-1)^|a| a d(b)")
    return rep


def ground_field_algebra(fld: Field) -> DgAlgebra:
    """The field itself as a one-dimensional algebra."""
    return DgAlgebra(fld, ["1"], [0], {(0, 0): {0: 1}}, {0: 1})
