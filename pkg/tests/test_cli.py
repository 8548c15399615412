import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from steering_hierarchy import boundaries as bd
from steering_hierarchy.cli import main, parse_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_cm(tmp_path, matrix, name="cm.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"n_modes_a": 1, "n_modes_b": 1, "matrix": np.asarray(matrix).tolist()}))
    return str(path)


def test_parse_grid():
    assert parse_grid("2,3,4", integer=True) == [2, 3, 4]
    assert parse_grid("0:1:3", integer=False) == [0.0, 0.5, 1.0]
    assert parse_grid("2:8:4", integer=True) == [2, 4, 6, 8]
    for bad in ("", "a,b", "1:2", "2:3:3"):
        with pytest.raises(UsageError):
            parse_grid(bad, integer=True)


def test_boundary_werner_csv(capsys):
    code, out, err = run(capsys, "boundary", "werner", "--grid", "2,3,4,5")
    assert code == 0 and err == ""
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    first = rows[0]
    assert (first["param"], first["eta_ent"], first["eta_steer"], first["eta_steer_kind"]) == ("2", "0.333333333", "0.5", "exact")
    assert first["eta_bell_lower"] == "0.6595"
    assert float(first["eta_bell_upper"]) == pytest.approx(0.707107, abs=1e-6)


def test_csv_round_trip(capsys):
    _, out, _ = run(capsys, "boundary", "inept", "--grid", "0.1:0.9:9")
    for row in csv.DictReader(io.StringIO(out)):
        report = bd.inept_boundaries(float(row["param"]))
        assert float(row["eta_ent"]) == float(f"{report.eta_ent:.9g}")
        assert float(row["eta_steer"]) == float(f"{report.eta_steer:.9g}")
        assert row["eta_bell_lower"] == ""


def test_boundary_inept_half(capsys):
    _, out, _ = run(capsys, "boundary", "inept", "--grid", "0.5")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["eta_steer"] == "0.5" and row["eta_steer_kind"] == "exact"


def test_boundary_gaussian_json(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("STEERING_HIERARCHY_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "boundary", "gaussian-symmetric", "--grid", "0.1:10:50", "--format", "json", "--output", "g.json")
    assert code == 0 and out == ""
    records = json.loads((tmp_path / "g.json").read_text())
    assert len(records) == 50
    assert all(r["eta_steer_kind"] == "upper_bound" for r in records)


def test_exit_codes(capsys):
    assert run(capsys, "boundary", "werner", "--grid", "x")[0] == 2
    assert run(capsys, "boundary", "ghz", "--grid", "2")[0] == 2
    code, out, err = run(capsys, "boundary", "inept", "--grid", "0,0.5")
    assert code == 1 and out == "" and "product state" in err
    assert run(capsys, "simulate", "inept", "--eta", "0.5")[0] == 2
    assert run(capsys, "simulate", "werner", "--d", "2", "--eta", "1.5")[0] == 1


def test_simulate_isotropic(capsys):
    code, out, _ = run(capsys, "simulate", "isotropic", "--d", "4", "--eta", "0.2", "--shots", "200000", "--seed", "1")
    rec = json.loads(out)
    assert code == 0
    assert rec["theoretical_quantum"] == pytest.approx(0.1)
    assert rec["theoretical_cheat_bound"] == pytest.approx(0.130208333)
    assert rec["verdict"] == "not_steerable_at_this_eta"


def test_simulate_inept_verdict_sign(capsys):
    _, out, _ = run(capsys, "simulate", "inept", "--epsilon", "0.3", "--eta", "0.7", "--shots", "100000", "--seed", "7")
    rec = json.loads(out)
    expected = bd.inept_steering_excess(0.3, 0.7) > 0
    assert (rec["verdict"] == "steerable") == expected


def test_gaussian_check_vacuum(capsys, tmp_path):
    code, out, _ = run(capsys, "gaussian", "check", "--cm", write_cm(tmp_path, np.eye(4)))
    assert code == 0
    assert json.loads(out) == {"valid": True, "separable": True, "steerable": False, "reid_product": 1.0}


def test_gaussian_check_squeezed(capsys, tmp_path):
    r = 0.5
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    m = [[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]]
    rec = json.loads(run(capsys, "gaussian", "check", "--cm", write_cm(tmp_path, m))[1])
    assert rec["steerable"] is True and rec["separable"] is False
    assert rec["reid_product"] == pytest.approx(0.41997, abs=1e-5)


def test_gaussian_errors(capsys, tmp_path):
    code, _, err = run(capsys, "gaussian", "check", "--cm", write_cm(tmp_path, 0.5 * np.eye(4)))
    assert code == 1 and "invalid covariance matrix" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "gaussian", "check", "--cm", str(bad))[0] == 2


def test_gaussian_witness_and_ensemble(capsys, tmp_path):
    r = 0.5
    ch, sh = math.cosh(2 * r), math.sinh(2 * r)
    tmsv = write_cm(tmp_path, [[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]], "t.json")
    code, out, _ = run(capsys, "gaussian", "witness", "--cm", tmsv, "--certificate")
    rec = json.loads(out)
    assert code == 0 and np.array(rec["measurement"]).shape == (2, 2)
    assert rec["certificate"]["margin"] < 0
    assert run(capsys, "gaussian", "ensemble", "--cm", tmsv)[0] == 1
    code, out, _ = run(capsys, "gaussian", "ensemble", "--cm", write_cm(tmp_path, np.eye(4), "v.json"))
    assert code == 0 and np.allclose(json.loads(out)["ensemble_cm"], np.eye(2))


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "steering_hierarchy", "boundary", "isotropic", "--grid", "2"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines()[0].startswith("param,eta_ent")
