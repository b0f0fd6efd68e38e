"""JSON documents describing an algebra, its bimodules and a tensor structure.

Layout::

    {"format": "dgdy", "version": 1, "name": ..., "field": "Q",
     "algebra": {"basis": [[name, degree], ...], "unit": [[name, coeff], ...],
                 "mult": [[a, b, c, coeff], ...], "diff": [[a, c, coeff], ...]},
     "bimodules": {name: {"n_left": n, "dims": {deg: dim},
                          "actions": [[slot, deg, a, rows], ...],
                          "diff": [[deg, rows], ...]}},
     "structure": {"gamma": name, "unit": name, "mode": "strict", "sign": "swap",
                   "maps": {"alpha": [[deg, rows], ...], ...}}}

Slot 0 is the right action.  Coefficients are strings in the field's text
encoding (``"-3/4"`` over Q, residues over F_p); ``rows`` is a dense
matrix, listed only when nonzero.  Output is key-sorted so serializing the
same object twice gives identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dgcore import (DgAlgebra, Morphism, NFoldBimodule, TensorSign, TreeEngine, validate_algebra,
                     validate_bimodule)
from .dgcore.algebra import ValidationReport
from .errors import ValidationError
from .exactfield import Field, Matrix, field_from_name
from .structure import MAP_TREES, Mode, PseudoTensorStructure

FORMAT = "dgdy"
VERSION = 1
MAP_NAMES = ("alpha", "alpha_inv", "ell", "r", "sym", "eta", "mu", "kappa", "lam")
_MAP_DEGREE = {"eta": -1, "mu": -1, "kappa": -1, "lam": -1}


class ParseError(ValueError):
    """The document is not well formed (syntax, missing keys, bad shapes)."""


# -- writing ------------------------------------------------------------------------

def _rows(fld: Field, mat: Matrix) -> list[list[str]]:
    return [[fld.format(x) for x in row] for row in mat.raw_rows()]


def algebra_to_dict(A: DgAlgebra) -> dict:
    fld, names = A.field, A.names
    mult = [[names[i], names[j], names[k], fld.format(x)]
            for (i, j), v in sorted(A.mult.items()) for k, x in sorted(v.items())]
    diff = [[names[i], names[k], fld.format(x)] for i, v in sorted(A.diff.items()) for k, x in sorted(v.items())]
    return {
        "basis": [[n, d] for n, d in zip(names, A.degrees)],
        "unit": [[names[k], fld.format(x)] for k, x in sorted(A.unit.items())],
        "mult": mult,
        "diff": diff,
    }


def bimodule_to_dict(m: NFoldBimodule) -> dict:
    fld, A = m.field, m.algebra
    actions, diff = [], []
    for deg in m.degrees():
        if m.dim(deg + 1):
            mat = m.diff_matrix(deg)
            if not mat.is_zero():
                diff.append([deg, _rows(fld, mat)])
        for slot in range(m.n_left + 1):
            for a in range(A.dim):
                if not m.dim(deg + A.degrees[a]):
                    continue
                mat = m.action_matrix(slot, a, deg)
                if not mat.is_zero():
                    actions.append([slot, deg, A.names[a], _rows(fld, mat)])
    return {"n_left": m.n_left, "dims": {str(d): m.dim(d) for d in m.degrees()},
            "actions": actions, "diff": diff}


def morphism_to_list(f: Morphism) -> list:
    out = []
    for s in f.source.degrees():
        if not f.target.dim(s + f.degree):
            continue
        mat = f.matrix(s)
        if not mat.is_zero():
            out.append([s, _rows(f.field, mat)])
    return out


def structure_to_dict(s: PseudoTensorStructure, A: DgAlgebra | None = None) -> dict:
    A = A or s.algebra
    maps = {}
    for name in MAP_NAMES:
        f = getattr(s, name)
        if f is not None:
            maps[name] = morphism_to_list(f)
    return {
        "format": FORMAT,
        "version": VERSION,
        "name": s.name,
        "field": s.field.name,
        "algebra": algebra_to_dict(A),
        "bimodules": {"G": bimodule_to_dict(s.gamma), "U": bimodule_to_dict(s.unit)},
        "structure": {"gamma": "G", "unit": "U", "mode": s.mode.value, "sign": s.sign.value, "maps": maps},
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def serialize(s: PseudoTensorStructure) -> str:
    return dumps(structure_to_dict(s))


# -- reading ------------------------------------------------------------------------

def _need(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"{where}: missing key {key!r}")
    return d[key]


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError(f"{where}: expected an integer, got {x!r}")
    try:
        return int(x)
    except ValueError:
        raise ParseError(f"{where}: expected an integer, got {x!r}") from None


def _coeff(fld: Field, x, where: str):
    if isinstance(x, int) and not isinstance(x, bool):
        return fld.coerce(x)
    if not isinstance(x, str):
        raise ParseError(f"{where}: coefficient must be a string, got {x!r}")
    try:
        return fld.parse(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _matrix(fld: Field, rows, nrows: int, ncols: int, where: str) -> Matrix:
    if not isinstance(rows, list) or len(rows) != nrows or any(not isinstance(r, list) or len(r) != ncols for r in rows):
        raise ParseError(f"{where}: expected a {nrows}x{ncols} matrix")
    data = [[_coeff(fld, x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    return Matrix.raw(fld, nrows, ncols, data)


def _elem(A_index: dict, x, where: str) -> int:
    if isinstance(x, int) and not isinstance(x, bool) and 0 <= x < len(A_index):
        return x
    if isinstance(x, str) and x in A_index:
        return A_index[x]
    raise ParseError(f"{where}: unknown algebra element {x!r}")


def algebra_from_dict(fld: Field, d: dict) -> DgAlgebra:
    basis = _need(d, "basis", "algebra")
    if not isinstance(basis, list) or not basis:
        raise ParseError("algebra.basis: expected a nonempty list of [name, degree]")
    names, degrees = [], []
    for i, e in enumerate(basis):
        if not isinstance(e, list) or len(e) != 2 or not isinstance(e[0], str):
            raise ParseError(f"algebra.basis[{i}]: expected [name, degree]")
        names.append(e[0])
        degrees.append(_int(e[1], f"algebra.basis[{i}]"))
    if len(set(names)) != len(names):
        raise ParseError("algebra.basis: names must be distinct")
    idx = {n: i for i, n in enumerate(names)}
    mult: dict = {}
    for t, e in enumerate(d.get("mult", [])):
        where = f"algebra.mult[{t}]"
        if not isinstance(e, list) or len(e) != 4:
            raise ParseError(f"{where}: expected [a, b, c, coeff]")
        a, b, c = (_elem(idx, x, where) for x in e[:3])
        vec = mult.setdefault((a, b), {})
        vec[c] = fld.add(vec.get(c, fld.zero), _coeff(fld, e[3], where))
    unit = {}
    for t, e in enumerate(_need(d, "unit", "algebra")):
        where = f"algebra.unit[{t}]"
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"{where}: expected [a, coeff]")
        unit[_elem(idx, e[0], where)] = _coeff(fld, e[1], where)
    diff: dict = {}
    for t, e in enumerate(d.get("diff", [])):
        where = f"algebra.diff[{t}]"
        if not isinstance(e, list) or len(e) != 3:
            raise ParseError(f"{where}: expected [a, c, coeff]")
        a, c = _elem(idx, e[0], where), _elem(idx, e[1], where)
        vec = diff.setdefault(a, {})
        vec[c] = fld.add(vec.get(c, fld.zero), _coeff(fld, e[2], where))
    return DgAlgebra(fld, names, degrees, mult, unit, diff)


def bimodule_from_dict(A: DgAlgebra, name: str, d: dict) -> NFoldBimodule:
    where = f"bimodules.{name}"
    fld = A.field
    n_left = _int(_need(d, "n_left", where), f"{where}.n_left")
    if n_left < 0:
        raise ParseError(f"{where}.n_left: must be nonnegative")
    raw_dims = _need(d, "dims", where)
    if not isinstance(raw_dims, dict):
        raise ParseError(f"{where}.dims: expected an object degree -> dim")
    dims = {_int(k, f"{where}.dims"): _int(v, f"{where}.dims") for k, v in raw_dims.items()}
    if any(v < 0 for v in dims.values()):
        raise ParseError(f"{where}.dims: negative dimension")
    idx = {n: i for i, n in enumerate(A.names)}
    diff = {}
    for t, e in enumerate(d.get("diff", [])):
        w = f"{where}.diff[{t}]"
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"{w}: expected [degree, rows]")
        deg = _int(e[0], w)
        diff[deg] = _matrix(fld, e[1], dims.get(deg + 1, 0), dims.get(deg, 0), w)
    right: dict = {}
    left: list[dict] = [dict() for _ in range(n_left)]
    for t, e in enumerate(d.get("actions", [])):
        w = f"{where}.actions[{t}]"
        if not isinstance(e, list) or len(e) != 4:
            raise ParseError(f"{w}: expected [slot, degree, element, rows]")
        slot, deg = _int(e[0], w), _int(e[1], w)
        a = _elem(idx, e[2], w)
        if not 0 <= slot <= n_left:
            raise ParseError(f"{w}: slot {slot} out of range 0..{n_left}")
        mat = _matrix(fld, e[3], dims.get(deg + A.degrees[a], 0), dims.get(deg, 0), w)
        (right if slot == 0 else left[slot - 1])[(deg, a)] = mat
    return NFoldBimodule(A, n_left, dims, diff, right, left, name=name)


def parse_document(doc) -> tuple[DgAlgebra, dict[str, NFoldBimodule], PseudoTensorStructure | None]:
    """Build and validate everything described by ``doc``.

    Raises :class:`ParseError` for malformed input and
    :class:`ValidationError` (carrying a combined report) when a validator
    fails.
    """
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    if doc.get("format", FORMAT) != FORMAT:
        raise ParseError(f"unknown format {doc.get('format')!r}")
    try:
        fld = field_from_name(str(_need(doc, "field", "document")))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    A = algebra_from_dict(fld, _need(doc, "algebra", "document"))
    report = ValidationReport()
    rep = validate_algebra(A)
    for v in rep.violations:
        report.add(f"algebra {v.axiom}", v.witness, v.detail)
    raw = doc.get("bimodules", {})
    if not isinstance(raw, dict):
        raise ParseError("bimodules: expected an object")
    mods = {name: bimodule_from_dict(A, name, d) for name, d in sorted(raw.items())}
    if report.ok:
        for name, m in mods.items():
            for v in validate_bimodule(m).violations:
                report.add(f"{name} {v.axiom}", v.witness, v.detail)
    if not report.ok:
        raise ValidationError(f"invalid input:\n{report}", report)
    st = doc.get("structure")
    if st is None:
        return A, mods, None
    gname, uname = _need(st, "gamma", "structure"), _need(st, "unit", "structure")
    for n in (gname, uname):
        if n not in mods:
            raise ParseError(f"structure: unknown bimodule {n!r}")
    try:
        mode = Mode(st.get("mode", "strict"))
        sign = TensorSign(st.get("sign", "swap"))
    except ValueError as exc:
        raise ParseError(f"structure: {exc}") from None
    gamma, unit = mods[gname], mods[uname]
    maps_raw = _need(st, "maps", "structure")
    for req in ("alpha", "ell", "r", "sym"):
        if req not in maps_raw:
            raise ParseError(f"structure.maps: missing {req!r}")
    maps = {}
    eng = TreeEngine(A, {"G": gamma, "U": unit}, sign)
    for name, entries in maps_raw.items():
        if name not in MAP_NAMES:
            raise ParseError(f"structure.maps: unknown map {name!r}")
        src_tree, tgt_tree = MAP_TREES[name]
        src, tgt = eng.module(src_tree), eng.module(tgt_tree)
        k = _MAP_DEGREE.get(name, 0)
        blocks = {}
        for t, e in enumerate(entries):
            w = f"structure.maps.{name}[{t}]"
            if not isinstance(e, list) or len(e) != 2:
                raise ParseError(f"{w}: expected [degree, rows]")
            s = _int(e[0], w)
            blocks[s] = _matrix(fld, e[1], tgt.dim(s + k), src.dim(s), w)
        maps[name] = blocks
    s = PseudoTensorStructure(gamma, unit, maps["alpha"], maps["ell"], maps["r"], maps["sym"],
                              alpha_inv=maps.get("alpha_inv"), eta=maps.get("eta"), mu=maps.get("mu"),
                              kappa=maps.get("kappa"), lam=maps.get("lam"), mode=mode, sign=sign,
                              engine=eng, name=str(doc.get("name", "structure")))
    return A, mods, s


def parse_text(text: str):
    if not text.strip():
        raise ParseError("empty input")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    return parse_document(doc)


def parse_input(path) -> tuple[DgAlgebra, dict[str, NFoldBimodule], PseudoTensorStructure | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_text(text)


__all__ = [
    "FORMAT", "VERSION", "ParseError", "algebra_to_dict", "bimodule_to_dict", "structure_to_dict",
    "serialize", "dumps", "algebra_from_dict", "bimodule_from_dict", "parse_document", "parse_text",
    "parse_input",
]
