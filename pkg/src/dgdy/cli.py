"""Command line front end.

Exit codes: 0 success, 2 unreadable input or inconsistent flags,
3 failed validation, 4 resource cap exceeded.  Output depends only on
the inputs and flags.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .classical import PointedFusionData, bar_oracle, group_table, hdy_classical, parse_group_table
from .complexes import ComplexError, TotalSign
from .dgcore import TensorSign, tensor_bimodules, validate_algebra, validate_bimodule
from .dy import build_dy, deformation_from_cocycle, hdy, hdy_table, verify_deformed_pentagon
from .errors import DEFAULT_UNKNOWN_CAP, PaddingError, ResourceCapError, ValidationError, WindowError
from .exactfield import field_from_name
from .fileformat import ParseError, parse_input, serialize
from .fixtures import make_fixture
from .structure import coherence_check, contraction_table, perfectness_report, validate_structure

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_CAP = 0, 2, 3, 4
THREADS_ENV = "DGDY_THREADS"


def thread_count() -> int:
    """Worker count from the environment.  Computations are currently
    serial, so this only validates the setting."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise click.UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _guard(fn):
    """Map library errors onto exit codes."""
    def wrapper(*args, **kwargs):
        try:
            thread_count()
            return fn(*args, **kwargs)
        except _Fail as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except ResourceCapError as exc:
            click.echo(f"resource cap: {exc}", err=True)
            sys.exit(EXIT_CAP)
        except (ValidationError, ComplexError, PaddingError) as exc:
            click.echo(f"validation error: {exc}", err=True)
            sys.exit(EXIT_INVALID)
        except WindowError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _field(name: str):
    try:
        return field_from_name(name)
    except ValueError as exc:
        raise _Fail(EXIT_PARSE, str(exc)) from None


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise _Fail(EXIT_PARSE, f"window must look like LO,HI, got {text!r}") from None
    if lo > hi:
        raise _Fail(EXIT_PARSE, f"empty window {text!r}")
    return lo, hi


def _load(fixture: str | None, input_path: str | None, field: str, sign: str = "swap"):
    """``(algebra, modules, structure)`` from a fixture name or an input file."""
    if (fixture is None) == (input_path is None):
        raise _Fail(EXIT_PARSE, "give exactly one of --fixture and --input")
    if input_path is not None:
        return parse_input(input_path)
    try:
        A, s = make_fixture(fixture, _field(field), sign=TensorSign(sign))
    except KeyError as exc:
        raise _Fail(EXIT_PARSE, exc.args[0]) from None
    return A, {"G": s.gamma, "U": s.unit}, s


def _structure(fixture, input_path, field, sign="swap"):
    A, mods, s = _load(fixture, input_path, field, sign)
    if s is None:
        raise _Fail(EXIT_INVALID, "input describes no tensor structure")
    return s


def _emit_betti(rows, fmt: str, title: str):
    """``rows``: (degree, betti, note) triples."""
    if fmt == "csv":
        click.echo("degree,betti")
        for deg, b, _ in rows:
            click.echo(f"{deg},{b}")
        return
    click.echo(title)
    click.echo(f"{'degree':>6}  {'betti':>5}  notes")
    for deg, b, note in rows:
        click.echo(f"{deg:>6}  {b:>5}  {note}".rstrip())


source_opts = [
    click.option("--fixture", help="built-in fixture name"),
    click.option("--input", "input_path", type=click.Path(dir_okay=False), help="JSON input document"),
    click.option("--field", default="Q", show_default=True, help="Q or Fp"),
    click.option("--tensor-sign", type=click.Choice(["swap", "koszul"]), default="swap", show_default=True,
                 help="sign rule for fixture tensor products"),
]
dy_opts = [
    click.option("--max-n", default=5, show_default=True, type=click.IntRange(min=1)),
    click.option("--window", default="-4,4", show_default=True, help="internal degree window LO,HI"),
    click.option("--convention", type=click.Choice(["h", "v"]), default="h", show_default=True,
                 help="total sign: h = d_h + (-1)^n d_v, v = d_v + (-1)^m d_h"),
    click.option("--cap", default=DEFAULT_UNKNOWN_CAP, show_default=True, type=click.IntRange(min=1),
                 help="largest Hom system (unknowns) to attempt"),
]
fmt_opt = click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)


def _apply(opts):
    def deco(fn):
        for o in reversed(opts):
            fn = o(fn)
        return fn
    return deco


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Davydov-Yetter cohomology of pseudo dg-tensor structures."""


@main.command()
@_apply(source_opts)
@_guard
def validate(fixture, input_path, field, tensor_sign):
    """Run every validator and the coherence checks."""
    A, mods, s = _load(fixture, input_path, field, tensor_sign)
    failed = False
    rep = validate_algebra(A)
    click.echo(f"algebra: dim {A.dim} over {A.field}, {'valid' if rep.ok else 'INVALID'}")
    failed |= not rep.ok
    for name, m in sorted(mods.items()):
        r = validate_bimodule(m)
        dims = ", ".join(f"{d}:{m.dim(d)}" for d in m.degrees())
        click.echo(f"bimodule {name}: n_left {m.n_left}, dims {{{dims}}}, {'valid' if r.ok else 'INVALID'}")
        failed |= not r.ok
    if s is not None:
        r = validate_structure(s)
        click.echo(f"structure {s.name}: {'valid' if r.ok else 'INVALID'} ({s.mode.value})")
        failed |= not r.ok
        coh = coherence_check(s)
        for res in coh.results.values():
            click.echo(f"  {res}")
            failed |= not res.ok
        perf = perfectness_report(s)
        click.echo(f"perfectness: {'ok' if perf.ok else perf}")
    if failed:
        raise _Fail(EXIT_INVALID, "validation failed")


@main.command()
@_apply(source_opts)
@click.option("--left", default="G", show_default=True, help="outer module")
@click.option("--right", default="G", show_default=True, help="module contracted into the outer one")
@click.option("--slot", default=1, show_default=True, type=click.IntRange(min=1))
@fmt_opt
@_guard
def tensor(fixture, input_path, field, tensor_sign, left, right, slot, fmt):
    """Dimensions of a tensor product over the algebra."""
    A, mods, s = _load(fixture, input_path, field, tensor_sign)
    for n in (left, right):
        if n not in mods:
            raise _Fail(EXIT_PARSE, f"unknown bimodule {n!r}; have {', '.join(sorted(mods))}")
    if slot > mods[left].n_left:
        raise _Fail(EXIT_PARSE, f"{left} has only {mods[left].n_left} left slots")
    m = tensor_bimodules(mods[left], mods[right], slot, TensorSign(tensor_sign))
    if fmt == "csv":
        click.echo("degree,dim")
        for d in m.degrees():
            click.echo(f"{d},{m.dim(d)}")
        return
    click.echo(f"{left} (x)_{slot} {right}: n_left {m.n_left}")
    for d in m.degrees():
        click.echo(f"  degree {d:>3}: {m.dim(d)}")
    if s is not None and left == right == "G" and A.idempotents() is not None:
        click.echo("contractions G(e_i A, e_j A) e_l by degree:")
        for (i, j), row in sorted(contraction_table(s).items()):
            cells = "  ".join(f"deg {deg}: {row[deg]}" for deg in sorted(row))
            click.echo(f"  ({i},{j})  {cells}")


def _build(fixture, input_path, field, tensor_sign, max_n, window, convention, cap):
    s = _structure(fixture, input_path, field, tensor_sign)
    conv = TotalSign.HORIZONTAL_FIRST if convention == "h" else TotalSign.VERTICAL_FIRST
    return build_dy(s, max_n, _window(window), convention=conv, cap=cap)


def _betti_rows(dc, with_components=True):
    rows = []
    for r in hdy_table(dc):
        notes = []
        if with_components and r.dim:
            notes.append(" ".join(f"({n},{m}):{d}" for (n, m), d in sorted(r.component_dims.items()) if d))
        if r.unreliable:
            notes.append("[unreliable: window]")
        rows.append((r.degree, r.dim, "  ".join(notes)))
    return rows


@main.command()
@_apply(source_opts)
@_apply(dy_opts)
@fmt_opt
@_guard
def dy(fixture, input_path, field, tensor_sign, max_n, window, convention, cap, fmt):
    """Dimensions of the double complex and its cohomology."""
    dc = _build(fixture, input_path, field, tensor_sign, max_n, window, convention, cap)
    if fmt == "table":
        click.echo(f"DY^(n,m) dimensions for {dc.s.name} over {dc.field} (rows m, columns n)")
        cols = list(range(dc.max_n + 1))
        click.echo("   m | " + " ".join(f"{n:>5}" for n in cols))
        for m in dc.rows():
            click.echo(f"{m:>4} | " + " ".join(f"{dc.dim(n, m):>5}" for n in cols))
        click.echo(f"differentials: {dc.double_complex().commutation()}; d_tot^2 = 0 checked")
    _emit_betti(_betti_rows(dc, with_components=False), fmt, "HDY by total degree")


@main.command("hdy")
@_apply(source_opts)
@_apply(dy_opts)
@click.option("--degree", type=int, default=None, help="single degree; refuses if the window is too small")
@fmt_opt
@_guard
def hdy_cmd(fixture, input_path, field, tensor_sign, max_n, window, convention, cap, degree, fmt):
    """Betti numbers of the total complex with (n,m) components."""
    dc = _build(fixture, input_path, field, tensor_sign, max_n, window, convention, cap)
    if degree is None:
        _emit_betti(_betti_rows(dc), fmt, f"HDY of {dc.s.name} over {dc.field}")
        return
    r = hdy(dc, degree)
    comp = " ".join(f"({n},{m}):{d}" for (n, m), d in sorted(r.component_dims.items()) if d)
    _emit_betti([(degree, r.dim, comp if r.dim else "")], fmt, f"HDY of {dc.s.name} over {dc.field}")


@main.command()
@_apply(source_opts)
@_apply(dy_opts)
@_guard
def deform(fixture, input_path, field, tensor_sign, max_n, window, convention, cap):
    """First-order deformations of the associator from HDY^4."""
    dc = _build(fixture, input_path, field, tensor_sign, max_n, window, convention, cap)
    s = dc.s
    rep = hdy(dc, 4)
    reps = rep.representatives.get(4, [])
    if not reps:
        click.echo("HDY⁴ dim 0; no deformations")
        return
    click.echo(f"HDY⁴ dim {len(reps)}")
    for i, v in enumerate(reps, 1):
        d = deformation_from_cocycle(dc, v)
        pr = verify_deformed_pentagon(s, d)
        nz = sum(1 for x in d.blocks.get((3, 1), []) if x != 0)
        click.echo(f"class {i}: pentagon {pr}; eta^(3,1) has {nz} nonzero coordinates")


@main.command()
@click.option("--group", default=None, help="trivial, z2, z3, z4, s3 or zN")
@click.option("--table", "table_path", type=click.Path(dir_okay=False), default=None,
              help="group table file: order, then rows of 0-based indices")
@click.option("--field", default="Q", show_default=True)
@click.option("--max-n", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--oracle", is_flag=True, help="also run the bar-complex oracle and compare")
@fmt_opt
@_guard
def classical(group, table_path, field, max_n, oracle, fmt):
    """Classical DY cohomology of a pointed category (degrees 0..max_n-1)."""
    if (group is None) == (table_path is None):
        raise _Fail(EXIT_PARSE, "give exactly one of --group and --table")
    fld = _field(field)
    if table_path is not None:
        try:
            table = parse_group_table(Path(table_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ParseError(str(exc)) from None
        name = Path(table_path).stem
    else:
        try:
            table = group_table(group)
        except KeyError as exc:
            raise _Fail(EXIT_PARSE, exc.args[0]) from None
        name = group
    pfd = PointedFusionData(table, fld, name=name)
    rep = hdy_classical(pfd, max_n)
    check = bar_oracle(table, fld, max_n) if oracle else None
    rows = []
    for n in range(max_n):
        note = ""
        if check is not None:
            note = "oracle agrees" if check.betti[n] == rep.betti[n] else f"ORACLE {check.betti[n]}"
        rows.append((n, rep.betti[n], note))
    _emit_betti(rows, fmt, f"classical DY of {name} over {fld}, degrees 0..{max_n - 1}")
    if check is not None and any(check.betti[n] != rep.betti[n] for n in range(max_n)):
        raise _Fail(EXIT_INVALID, "bar oracle disagrees")


@main.command()
@click.argument("name")
@click.option("--field", default="Q", show_default=True)
@click.option("--tensor-sign", type=click.Choice(["swap", "koszul"]), default="swap", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="write here instead of stdout")
@_guard
def fixture(name, field, tensor_sign, output):
    """Serialize a built-in fixture to the JSON input format."""
    try:
        _, s = make_fixture(name, _field(field), sign=TensorSign(tensor_sign))
    except KeyError as exc:
        raise _Fail(EXIT_PARSE, exc.args[0]) from None
    text = serialize(s)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
