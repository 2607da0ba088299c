import json
import shutil
import subprocess
import sys

import pytest

from capform.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_discform_example(capsys):
    rep = _json(capsys, "discform", "--order", "catalog:2")
    assert rep["order"] == 4 and rep["level"] == 2 and rep["milgram"] == "-2"


@pytest.mark.parametrize("signs,expected", [("2:1", {"-1": "1", "-2": "-1"}), ("2:-1", {"-1": "1", "-2": "1"})])
def test_coeff_example(capsys, signs, expected):
    got = _json(capsys, "coeff", "--order", "catalog:2", "--beta", "1,0,0,0", "--al-signs", signs)
    assert got == {"norm": "1", "terms": expected}
    div = _json(capsys, "coeff", "--order", "catalog:2", "--beta", "1,0,0,0", "--al-signs", signs, "--form", "divisor")
    assert div == got


def test_verify_hecke_example(capsys):
    rep = _json(capsys, "verify", "--suite", "hecke", "--order", "catalog:2")
    assert rep["ok"]
    assert rep["suites"]["hecke"]["catalog:2"]["2"]["constant"] == "13"


def test_hecke_command(capsys):
    rep = _json(capsys, "hecke", "--order", "catalog:3", "--p", "3")
    assert rep["constant"] == "38" and rep["character_sums"]["ok"]
    unram = _json(capsys, "hecke", "--order", "catalog:2", "--p", "5")
    assert "unramified" in unram


def test_lfactor_command(capsys):
    assert _json(capsys, "lfactor", "--p", "3")["ok"]
    assert _json(capsys, "lfactor", "--p", "3", "--ramified")["ok"]


def test_weil_command(capsys):
    rep = _json(capsys, "weil", "--order", "catalog:3", "--matrix", "1,0,3,1")
    assert rep["gamma0_closed_form_agrees"]
    assert rep["rho"]["shape"] == [9, 9]
    rep = _json(capsys, "weil", "--order", "catalog:2", "--matrix", "0,-1,1,0")
    assert rep["word"] == "S"


def test_lift_command(capsys):
    rep = _json(capsys, "lift", "--order", "catalog:3", "--al-signs", "3:-1")
    assert rep["datum"]["al_signs"] == {"3": -1}
    assert all(r["factor_equals_e(-Q)"] for r in rep["t_factors"])


def test_out_flag(tmp_path, capsys):
    path = tmp_path / "d.json"
    code, out, _ = _run(capsys, "discform", "--order", "catalog:3", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["order"] == 9


def test_roundtrip_algebra(tmp_path, capsys):
    first = _json(capsys, "algebra", "--a", "-1", "--b", "-3", "--elt", "1,2,0,1")
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(first))
    again = _json(capsys, "algebra", "--in", str(path), "--elt", "1,2,0,1")
    assert again == first


def test_roundtrip_order(tmp_path, capsys):
    first = _json(capsys, "order", "--order", "catalog:5")
    path = tmp_path / "o.json"
    path.write_text(json.dumps(first))
    assert _json(capsys, "order", "--order", str(path)) == first


def test_roundtrip_coeff(tmp_path, capsys):
    table = _json(capsys, "coeff", "--order", "catalog:2", "--qmax", "3", "--al-signs", "2:-1")
    assert table
    for row in table[:10]:
        path = tmp_path / "c.json"
        path.write_text(json.dumps(row["A"]))
        assert _json(capsys, "coeff", "--in", str(path)) == row["A"]


def test_eval_command(tmp_path, capsys):
    maass = {"level": 2, "al_signs": {"2": 1}, "r": 3.0, "coeffs": {str(-k): 1.0 / k for k in range(1, 40)}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(maass))
    rep = _json(capsys, "eval", "--maass", str(path), "--point", "0.1,0.2,0.3,0.4;0.5", "--qmax", "4")
    assert rep["terms"] > 0 and isinstance(rep["value"], float)


def test_verify_all_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "--out", str(a)]) == 0
    assert run(["verify", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["ok"]


@pytest.mark.parametrize(
    "argv",
    [
        ["nosuch"],
        ["discform", "--bogus"],
        ["weil", "--matrix", "1,1,1,1"],
        ["weil", "--matrix", "1,x,0,1"],
        ["coeff", "--beta", "0,0,0,0"],
        ["coeff"],
        ["coeff", "--al-signs", "3:1", "--beta", "1,0,0,0"],
        ["discform", "--order", "/nonexistent/order.json"],
        ["lfactor", "--p", "4"],
        ["algebra", "--a", "-1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == 2


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(capsys, "discform", "--order", str(bad))[0] == 2
    assert _run(capsys, "eval", "--maass", str(bad), "--point", "0,0,0,0;1")[0] == 2


def test_verification_failure_exit_code(tmp_path, capsys, monkeypatch):
    from capform import hecke

    monkeypatch.setattr(hecke, "expected_ramified_eigenvalue", lambda p: 0)
    code, out, _ = _run(capsys, "hecke", "--order", "catalog:2", "--p", "2")
    assert code == 1
    assert json.loads(out)["status"] == "failed"


def test_console_script():
    exe = shutil.which("capform")
    cmd = [exe] if exe else [sys.executable, "-m", "capform.cli"]
    proc = subprocess.run(cmd + ["lfactor", "--p", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"]
