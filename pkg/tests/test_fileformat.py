"""The JSON input format: round trips, golden files and diagnostics."""

import json
from importlib import resources

import pytest

from dgdy.errors import ValidationError
from dgdy.fileformat import ParseError, parse_input, parse_text, serialize
from dgdy.fixtures import make_fixture
from dgdy.structure import coherence_check, validate_structure

ROUND_TRIP = [("trivial", "Q"), ("product-field", "Q"), ("kronecker-p1", "Q"), ("kronecker-p1", "F5"),
              ("cyclic-group-2", "F2"), ("cyclic-group-3", "Q")]


def golden(name):
    return resources.files("dgdy") / "data" / name


def chain_doc(d0="1", d1="1"):
    """A right module over k spanned in degrees 0, 1, 2 with d = (d0, d1)."""
    one = [["1"]]
    return {
        "format": "dgdy", "version": 1, "field": "Q",
        "algebra": {"basis": [["1", 0]], "unit": [["1", "1"]], "mult": [["1", "1", "1", "1"]], "diff": []},
        "bimodules": {"M": {"n_left": 0, "dims": {"0": 1, "1": 1, "2": 1},
                            "actions": [[0, k, "1", one] for k in range(3)],
                            "diff": [[0, [[d0]]], [1, [[d1]]]]}},
    }


@pytest.mark.parametrize("name,field", ROUND_TRIP)
def test_round_trip_is_byte_identical(name, field):
    _, s = make_fixture(name, field)
    text = serialize(s)
    A, mods, s2 = parse_text(text)
    assert serialize(s2) == text
    assert s2.gamma.dims == s.gamma.dims and s2.unit.dims == s.unit.dims
    for deg in s.alpha.source.degrees():
        assert s2.alpha.matrix(deg) == s.alpha.matrix(deg)


@pytest.mark.parametrize("fname", ["trivial.Q.json", "product-field.Q.json", "kronecker-p1.Q.json",
                                   "kronecker-p1.F5.json", "cyclic-group-2.Q.json", "cyclic-group-2.F2.json",
                                   "cyclic-group-3.Q.json"])
def test_golden_files_parse_and_validate(fname):
    with resources.as_file(golden(fname)) as path:
        A, mods, s = parse_input(path)
        assert validate_structure(s).ok
        assert coherence_check(s).ok
        assert serialize(s) == path.read_text(encoding="utf-8")


def test_golden_matches_fixture():
    _, s = make_fixture("kronecker-p1", "Q")
    assert golden("kronecker-p1.Q.json").read_text(encoding="utf-8") == serialize(s)


def test_bimodule_only_document():
    A, mods, s = parse_text(json.dumps(chain_doc(d1="0")))
    assert s is None and mods["M"].dims == {0: 1, 1: 1, 2: 1}


def test_nonzero_square_names_the_degree():
    with pytest.raises(ValidationError) as err:
        parse_text(json.dumps(chain_doc()))
    assert "d^2" in str(err.value) or "d²" in str(err.value)
    assert "degree 0" in str(err.value)


@pytest.mark.parametrize("text,fragment", [
    ("", "empty"),
    ("   \n", "empty"),
    ("{", "JSON"),
    ("[]", "object"),
    ('{"field": "Q"}', "algebra"),
    ('{"field": "F4", "algebra": {}}', "prime"),
    ('{"format": "other"}', "format"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_text(text)


def test_bad_matrix_shape():
    doc = chain_doc(d1="0")
    doc["bimodules"]["M"]["diff"][0] = [0, [["1", "0"]]]
    with pytest.raises(ParseError, match="diff"):
        parse_text(json.dumps(doc))


def test_unknown_element_and_slot():
    doc = chain_doc(d1="0")
    doc["bimodules"]["M"]["actions"][0] = [0, 0, "z", [["1"]]]
    with pytest.raises(ParseError):
        parse_text(json.dumps(doc))
    doc = chain_doc(d1="0")
    doc["bimodules"]["M"]["actions"][0] = [3, 0, "1", [["1"]]]
    with pytest.raises(ParseError, match="slot"):
        parse_text(json.dumps(doc))


def test_missing_structure_map():
    _, s = make_fixture("trivial", "Q")
    doc = json.loads(serialize(s))
    del doc["structure"]["maps"]["sym"]
    with pytest.raises(ParseError, match="sym"):
        parse_text(json.dumps(doc))


def test_unreadable_path(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        parse_input(tmp_path / "missing.json")
