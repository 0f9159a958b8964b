import json
import subprocess
import sys

import pytest

from pmx.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ideal_principal(capsys):
    code, out, _ = run(capsys, "ideal", "--kind", "principal", "--n", "4", "--t", "3")
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_verify_json(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "verify", "n4-colon", "--field", "Fp:32003", "--json", str(path))
    assert code == 0 and "pass" in out
    doc = json.loads(path.read_text())
    assert doc["status"] == "pass" and doc["result"]["check"] == "n4-colon"


def test_estimate_and_json_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["estimate", "--n", "3", "--t", "2", "--q", "101", "--samples", "1000000",
            "--invertible", "--seed", "42"]
    code, out, _ = run(capsys, *args, "--json", str(a))
    assert code == 0
    run(capsys, *args, "--json", str(b))
    assert a.read_bytes() == b.read_bytes()
    est = json.loads(a.read_text())["result"]["estimate"]
    assert abs(est - 3) < 0.5


def test_groebner_commands(capsys, tmp_path):
    assert run(capsys, "codim", "P3")[1].strip() == "4"
    assert run(capsys, "member", "f", "P3")[1].strip() == "false"
    assert run(capsys, "member", "f*det", "P3")[1].strip() == "true"
    assert run(capsys, "member", "f", "Q")[1].strip() == "true"
    assert run(capsys, "nf", "x[1,1]^2", "x[1,1]-x[2,2]", "--n", "2")[1].strip() == "x[2,2]^2"
    code, out, _ = run(capsys, "gb", "x[1,1]^2-1; x[1,1]*x[1,2]-1", "--n", "2", "--order", "lex")
    assert code == 0 and set(out.split("\n")[:-1]) == {"x[1,1] - x[1,2]", "x[1,2]^2 - 1"}
    assert run(capsys, "intersect", "x[1,1]", "x[1,2]", "--n", "2")[1].strip() == \
        "x[1,1]*x[1,2]"
    assert run(capsys, "colon", "x[1,1]*x[1,2]", "x[1,1]", "--n", "2")[1].strip() == "x[1,2]"
    assert run(capsys, "saturate", "P1", "det", "--n", "2")[1].split() == ["x[2,2]", "x[1,1]"]
    path = tmp_path / "p.ideal"
    assert run(capsys, "ideal", "--n", "3", "--t", "2", "--write", str(path))[0] == 0
    assert run(capsys, "codim", str(path))[1].strip() == "3"


def test_count_csv(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, out, _ = run(capsys, "count", "--n", "2", "--t", "2", "--q", "2", "--csv", str(path))
    assert code == 0
    assert path.read_text().splitlines()[0] == "n,q,t,rank,count"
    assert "2,2,2,1,9" in out


def test_budget_skip_exits_zero(capsys):
    code, out, _ = run(capsys, "saturate", "P3", "det", "--budget-pairs", "1")
    assert code == 0 and out.startswith("skip(budget)")


def test_env_budget_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("PMX_BUDGET_PAIRS", "1")
    assert run(capsys, "saturate", "P3", "det")[1].startswith("skip(budget)")
    code, out, _ = run(capsys, "saturate", "P3", "det", "--budget-pairs", "100000")
    assert code == 0 and not out.startswith("skip")


@pytest.mark.parametrize("argv", [
    ["gb", "P3", "--bogus"],
    ["verify", "nope"],
    ["nosuch"],
    ["codim", "x[9,9]"],
    ["gb", "P3", "--field", "Fp:4"],
    ["estimate", "--n", "3", "--q", "101"],
    ["member", "det - f", "x[1,1]", "--n", "3"],
    ["count", "--n", "3", "--t", "2", "--q", "4"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_suite_exit_codes(capsys):
    assert run(capsys, "suite", "p2-ci", "muir", "--n", "3")[0] == 0
    code, out, _ = run(capsys, "verify", "n4-fgen", "--f",
                       "x[1,1]*x[2,2]*x[3,3]*x[4,4]")
    assert code == 1 and "fail" in out


def test_every_subcommand_has_help():
    for cmd in ["gb", "nf", "member", "intersect", "colon", "saturate", "codim", "ideal",
                "count", "estimate", "verify", "suite"]:
        res = subprocess.run([sys.executable, "-m", "pmx.cli", cmd, "--help"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and "usage" in res.stdout
