import csv
import io
import json
import subprocess
import sys

import pytest

from qsu2.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_zeta_eval(capsys):
    code, out, _ = run(capsys, "zeta", "eval", "--z", "2")
    rows = csv_rows(out)
    assert code == 0
    assert [r["method"] for r in rows] == ["direct-sum", "closed-form"]
    assert float(rows[0]["agreement_rel"]) < 1e-8
    assert rows[0]["schema_version"] == "1"


def test_zeta_accepts_decimal_q(capsys):
    code, out, _ = run(capsys, "zeta", "eval", "--q", "0.5", "--z", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["rows"][0]["q"] == "1/2"


def test_zeta_grid_reports_errors_per_row(capsys):
    code, out, _ = run(capsys, "zeta", "grid", "--re", "0.5,2", "--im", "0")
    rows = csv_rows(out)
    assert code == 0 and len(rows) == 4
    assert rows[0]["error"].startswith("DivergenceError")
    assert rows[1]["error"].startswith("PoleError")
    assert rows[2]["error"] == rows[3]["error"] == ""


def test_zeta_poles(capsys):
    code, out, _ = run(capsys, "zeta", "poles")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert len(data["rows"]) == 9
    assert all(r["double_pole"] for r in data["rows"])


def test_zeta_dimension(capsys):
    code, out, _ = run(capsys, "zeta", "dimension", "--s", "1")
    data = json.loads(out)
    assert code == 0 and data["threshold"] == "1/2"
    assert {r["r"]: r["convergent"] for r in data["rows"]}["1/2"] is False


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum")
    rows = csv_rows(out)
    assert code == 0
    assert len(rows) == 2 * sum((l2 + 1) ** 2 for l2 in range(7))
    assert (rows[0]["l"], rows[0]["n"], rows[0]["component"]) == ("0", "-1/2", "1")
    assert float(rows[0]["abs_D"]) == pytest.approx(2 / 3)


@pytest.mark.parametrize("argv", [
    ["verify", "algebra", "--q", "1"],
    ["verify", "algebra", "--q", "0.5"],
    ["spectrum", "--q", "3/2"],
    ["verify", "algebra", "--tol", "nope=1"],
    ["verify", "algebra", "--trunc", "-1"],
    ["zeta", "dimension", "--s", "0"],
])
def test_config_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "config error" in err


def test_verify_is_deterministic(capsys, tmp_path):
    p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
    assert run(capsys, "verify", "algebra", "--out", str(p1))[0] == 0
    assert run(capsys, "verify", "algebra", "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    data = json.loads(p1.read_text())
    assert data["schema_version"] == 1 and data["passed"]
    assert all(r["status"] == "pass" for r in data["suites"]["algebra"])


def test_verify_csv(capsys):
    code, out, err = run(capsys, "verify", "action", "--format", "csv")
    rows = csv_rows(out)
    assert code == 0 and rows and all(r["status"] == "pass" for r in rows)
    assert "PASS action:" in err


def test_hochschild_counit_is_a_structured_error(capsys):
    code, out, err = run(capsys, "hochschild", "--tau", "counit")
    data = json.loads(out)
    assert code == 1
    assert data["error"]["kind"] == "precondition"
    assert "sigma_L" in data["error"]["identity"]
    assert "precondition failed" in err


def test_hochschild_default_tau(capsys):
    code, out, _ = run(capsys, "hochschild", "--twists", "0")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert data["certificates"][0]["tau_params"]["name"] == "h"


def test_export_gns(capsys):
    code, out, _ = run(capsys, "export-gns", "--trunc", "1")
    data = json.loads(out)
    assert code == 0 and data["truncation"]["dim"] == 5
    code, out, _ = run(capsys, "export-gns", "--trunc", "1", "--format", "csv")
    rows = csv_rows(out)
    assert len(rows) == 5 and rows[1]["l"] == "1/2"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qsu2", "zeta", "dimension", "--s", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["threshold"] == "1"
