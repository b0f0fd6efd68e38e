"""Command line behaviour: outputs, exit codes and determinism."""

import json
import os
import subprocess
import sys

import pytest
from click.testing import CliRunner

from cli_commands import ACCEPTANCE_COMMANDS
from dgdy.cli import main
from dgdy.fileformat import serialize
from dgdy.fixtures import make_fixture


def run(args, env=None):
    return CliRunner().invoke(main, args, env=env)


def test_dy_trivial():
    r = run(ACCEPTANCE_COMMANDS[0])
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    start = lines.index("HDY by total degree") + 2
    betti = {int(ln.split()[0]): int(ln.split()[1]) for ln in lines[start:]}
    # k -0-> k -1-> k -0-> k ...: only the identity in total degree 1 survives
    assert [betti[k] for k in range(5)] == [0, 1, 0, 0, 0]
    assert "unreliable" not in " ".join(lines[start:start + 5])


def test_classical_z2_f2():
    r = run(ACCEPTANCE_COMMANDS[1])
    assert r.exit_code == 0
    rows = [ln.split() for ln in r.output.splitlines()[2:]]
    assert [int(b) for _, b in rows] == [1, 1, 1, 1]


def test_deform_product_field():
    r = run(ACCEPTANCE_COMMANDS[2])
    assert r.exit_code == 0
    assert r.output.strip() == "HDY⁴ dim 0; no deformations"


def test_deform_p1_reports_pentagon():
    r = run(["deform", "--fixture", "kronecker-p1"])
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "HDY⁴ dim 1"
    assert "eps^0 pass, eps^1 pass" in r.output


def test_hdy_components_and_csv():
    r = run(["hdy", "--fixture", "kronecker-p1"])
    assert r.exit_code == 0
    assert "(3,1):5" in r.output
    r = run(["hdy", "--fixture", "kronecker-p1", "--format", "csv"])
    lines = r.output.splitlines()
    assert lines[0] == "degree,betti"
    assert lines[1:6] == ["0,0", "1,1", "2,0", "3,1", "4,1"]


def test_hdy_single_degree():
    r = run(["hdy", "--fixture", "kronecker-p1", "--degree", "4", "--format", "csv"])
    assert r.exit_code == 0 and r.output.splitlines()[1] == "4,1"
    r = run(["hdy", "--fixture", "trivial", "--degree", "4", "--max-n", "3"])
    assert r.exit_code == 2
    assert "incomplete" in r.output


def test_tensor_table():
    r = run(["tensor", "--fixture", "kronecker-p1"])
    assert r.exit_code == 0
    assert "(0,0)  deg 0: [1, 2]" in r.output
    assert "(1,1)  deg -1: [1, 0]" in r.output


def test_validate_golden(tmp_path):
    path = tmp_path / "p1.json"
    _, s = make_fixture("kronecker-p1", "Q")
    path.write_text(serialize(s), encoding="utf-8")
    r = run(["validate", "--input", str(path)])
    assert r.exit_code == 0, r.output
    assert "pentagon" in r.output


def test_fixture_command_writes_file(tmp_path):
    out = tmp_path / "t.json"
    r = run(["fixture", "trivial", "-o", str(out)])
    assert r.exit_code == 0
    assert json.loads(out.read_text())["name"] == "trivial-point"


def test_bad_square_exits_3(tmp_path):
    doc = {
        "format": "dgdy", "version": 1, "field": "Q",
        "algebra": {"basis": [["1", 0]], "unit": [["1", "1"]], "mult": [["1", "1", "1", "1"]], "diff": []},
        "bimodules": {"M": {"n_left": 0, "dims": {"0": 1, "1": 1, "2": 1},
                            "actions": [[0, k, "1", [["1"]]] for k in range(3)],
                            "diff": [[0, [["1"]]], [1, [["2"]]]]}},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    r = run(["validate", "--input", str(path)])
    assert r.exit_code == 3
    assert "degree 0" in r.output


@pytest.mark.parametrize("content", ["", "not json", "[1, 2]"])
def test_unparsable_exits_2(tmp_path, content):
    path = tmp_path / "in.json"
    path.write_text(content)
    assert run(["validate", "--input", str(path)]).exit_code == 2


@pytest.mark.parametrize("args", [
    ["dy"],
    ["dy", "--fixture", "trivial", "--input", "x.json"],
    ["dy", "--fixture", "no-such-thing"],
    ["dy", "--fixture", "trivial", "--field", "F6"],
    ["dy", "--fixture", "trivial", "--window", "3,1"],
    ["dy", "--fixture", "trivial", "--window", "abc"],
    ["classical", "--group", "a5"],
    ["classical"],
    ["tensor", "--fixture", "trivial", "--left", "H"],
])
def test_inconsistent_flags_exit_2(args):
    assert run(args).exit_code == 2


def test_symmetric3_not_a_dy_fixture():
    assert run(["dy", "--fixture", "symmetric-3"]).exit_code == 3


def test_bad_group_table_exits_3(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("2\n0 1\n1 1\n")
    r = run(["classical", "--table", str(path)])
    assert r.exit_code == 3 and "inverse" in r.output


def test_group_table_file(tmp_path):
    path = tmp_path / "z3.txt"
    path.write_text("3\n0 1 2\n1 2 0\n2 0 1\n")
    r = run(["classical", "--table", str(path), "--field", "F3", "--max-n", "3", "--format", "csv"])
    assert r.exit_code == 0
    assert r.output.splitlines() == ["degree,betti", "0,1", "1,1", "2,1"]


def test_resource_cap_exits_4():
    r = run(["hdy", "--fixture", "cyclic-group-4"])
    assert r.exit_code == 4
    assert "exceeds the cap" in r.output


def test_lower_cap_exits_4():
    assert run(["dy", "--fixture", "kronecker-p1", "--cap", "50"]).exit_code == 4


def test_thread_env_validated():
    assert run(["classical", "--group", "z2"], env={"DGDY_THREADS": "2"}).exit_code == 0
    assert run(["classical", "--group", "z2"], env={"DGDY_THREADS": "zero"}).exit_code == 2
    assert run(["classical", "--group", "z2"], env={"DGDY_THREADS": "0"}).exit_code == 2


def test_convention_flag_same_betti():
    a = run(["hdy", "--fixture", "cyclic-group-2", "--field", "F2", "--format", "csv"])
    b = run(["hdy", "--fixture", "cyclic-group-2", "--field", "F2", "--format", "csv", "--convention", "v"])
    assert a.exit_code == b.exit_code == 0
    assert a.output == b.output


@pytest.mark.parametrize("args", ACCEPTANCE_COMMANDS, ids=lambda a: " ".join(a[:3]))
def test_deterministic_in_process(args):
    first, second = run(args), run(args)
    assert first.exit_code == 0
    assert first.output == second.output


def test_deterministic_across_processes():
    args = ["hdy", "--fixture", "kronecker-p1", "--field", "F5"]
    cmd = [sys.executable, "-m", "dgdy.cli", *args]
    env = dict(os.environ, PYTHONHASHSEED="random")
    outs = [subprocess.run(cmd, capture_output=True, env=env, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
