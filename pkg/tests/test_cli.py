import json
import subprocess
import sys
from pathlib import Path

import pytest

from plane_bs import cli, documents
from plane_bs.resolution_graph import InvariantViolation

FIXTURES = Path(__file__).parent / "fixtures"


def run(argv, capsys):
    code = 0
    try:
        cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_roots_on_cusp(capsys):
    code, out, _ = run(["roots", str(FIXTURES / "cusp.json")], capsys)
    assert code == 0
    doc = json.loads(out)
    assert {e["root"]: e["multiplicity"] for e in doc["roots"]} == {"-5/6": 1, "-7/6": 1, "-1": 1}
    assert all("certificate" in s for e in doc["roots"] for s in e["sources"])


def test_roots_diagnostics(capsys):
    code, out, _ = run(["roots", str(FIXTURES / "cusp.json"), "--diagnostics", "--no-certificates"], capsys)
    doc = json.loads(out)
    assert [d["candidate"] for d in doc["diagnostics"]] == ["-4/3", "-3/2", "-5/3"]


def test_audit_summary(capsys):
    code, out, _ = run(["audit", str(FIXTURES / "example_s3.json"), "--format", "table"], capsys)
    assert code == 0
    assert out.strip() == "containment: PASS; jumping 8/8 matched; zeta poles 3/3 matched"


@pytest.mark.parametrize("name", ["example_s3_graph.json", "example_s3_selfint.json"])
def test_hand_entered_graph_matches_branch_input(name, capsys):
    _, a, _ = run(["roots", str(FIXTURES / "example_s3.json"), "--no-certificates"], capsys)
    _, b, _ = run(["roots", str(FIXTURES / name), "--no-certificates"], capsys)
    assert json.loads(a) == json.loads(b)


def test_validate_valid(capsys):
    code, out, _ = run(["validate", str(FIXTURES / "example_s3_graph.json")], capsys)
    assert code == 0 and json.loads(out)["validation"]["valid"]


def test_validate_names_the_broken_edge(capsys):
    code, out, _ = run(["validate", str(FIXTURES / "broken_decoration.json"), "--format", "table"], capsys)
    assert code == 1
    assert "INVALID" in out and "edge (E0,E2)" in out


def test_input_error_has_pointer(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"branches": [{"char_exponents": {"n": "x"}}]}))
    code, _, err = run(["roots", str(bad)], capsys)
    assert code == 1
    assert "/branches/0/char_exponents/n" in err


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"branches": [], "dual_graph": {}},
        {"branches": [{"char_exponents": {"n": 4, "betas": [6, 8]}}]},
        {"branches": [{"char_exponents": {"n": 2, "betas": [3]}}] * 2},
        {"dual_graph": {"vertices": [{"id": 0}], "edges": [], "arrowheads": [{"host": 0, "N": 1}]}},
    ],
)
def test_schema_errors_exit_one(doc, tmp_path, capsys):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["resolve", str(path)], capsys)
    assert code == 1 and err.startswith("input error at")


def test_missing_file_and_bad_json(tmp_path, capsys):
    assert run(["zeta", str(tmp_path / "nope.json")], capsys)[0] == 1
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert run(["zeta", str(path)], capsys)[0] == 1


def test_internal_violation_exits_two(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise InvariantViolation("residue sum off")

    monkeypatch.setattr(documents, "roots_section", boom)
    code, _, err = run(["roots", str(FIXTURES / "cusp.json")], capsys)
    assert code == 2
    assert "residue sum off" in err
    assert '"graph"' in err


def test_output_is_deterministic(tmp_path, capsys):
    outs = []
    for n in range(2):
        path = tmp_path / f"out{n}.json"
        run(["audit", str(FIXTURES / "two_cusps.json"), "--out", str(path)], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_random_audit(capsys):
    code, out, _ = run(["audit", "--random", "--seed", "3", "--count", "6"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["audit"]["summary"] == "random audit (seed 3): 6/6 curves PASS"
    _, again, _ = run(["audit", "--random", "--seed", "3", "--count", "6"], capsys)
    assert again == out


def test_audit_needs_exactly_one_source(capsys):
    assert run(["audit"], capsys)[0] == 1
    assert run(["audit", str(FIXTURES / "cusp.json"), "--random"], capsys)[0] == 1


@pytest.mark.parametrize("command", ["resolve", "roots", "jumping", "zeta", "validate", "audit"])
def test_table_format(command, capsys):
    code, out, _ = run([command, str(FIXTURES / "two_cusps.json"), "--format", "table"], capsys)
    assert code == 0 and out.strip()


def test_unknown_command_is_input_error(capsys):
    assert run(["frobnicate"], capsys)[0] == 1


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "plane_bs.cli", "zeta", str(FIXTURES / "cusp.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    poles = json.loads(proc.stdout)["zeta"]["poles"]
    assert [(p["location"], p["order"]) for p in poles] == [("-5/6", 1), ("-1", 1)]
