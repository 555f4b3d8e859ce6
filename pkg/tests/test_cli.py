import json
import math
import subprocess
import sys

import pytest

from scherk import cli, family


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    return json.loads(out)


def test_family_square(capsys):
    code, out, _ = run(capsys, "family", "--t", "1.5707963")
    assert code == 0
    rep = report(out)
    assert rep["status"] == "ok"
    # d(kappa^2)/dt is about 91 at pi/2, so the 8-digit flag moves kappa^2 in the 6th digit
    assert abs(rep["outputs"]["kappa_sq"] - 0.5 * math.pi**2) < 1e-5
    assert len(rep["outputs"]["vertices"]) == 4
    code, out, _ = run(capsys, "family", "--t", repr(0.5 * math.pi))
    assert abs(report(out)["outputs"]["kappa_sq"] - 0.5 * math.pi**2) < 1e-12


def test_family_below_critical(capsys):
    code, out, _ = run(capsys, "family", "--t", "1.0")
    assert code == 2
    rep = report(out)
    assert rep["status"] == "error" and "t_critical" in rep["message"]
    assert rep["inputs"]["t"] == 1.0


def test_family_json_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "family", "--t", "1.45", "--json", str(path))
    assert code == 0
    assert cli.Report.from_json(path.read_text()) == cli.Report.from_json(out)


def test_report_round_trip():
    rep = cli.Report("x", {"a": 0.1}, {"v": 1 / 3, "z": [0.1 + 2e-17, -1e-300]}, {"n": 2})
    back = cli.Report.from_json(rep.to_json())
    assert back == rep
    assert back.to_json() == rep.to_json()


def test_usage_errors(capsys):
    assert run(capsys, "family")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "solve-quad", "--w", "0.3")[0] == 2
    assert run(capsys, "psi", "--table", "1")[0] == 2
    assert run(capsys, "verify", "--tol", "nope=1")[0] == 2


def test_io_errors(capsys, tmp_path):
    missing = str(tmp_path / "no" / "such" / "file.obj")
    assert run(capsys, "mesh", "--n-r", "2", "--n-theta", "4", "--out", missing)[0] == 3
    assert run(capsys, "bounds", "--json", missing)[0] == 3


def test_mesh_obj_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    for path in (a, b):
        code, out, _ = run(capsys, "mesh", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert sum(line.startswith("v ") for line in lines) == 4096
    assert report(out)["outputs"]["vertices"] == 4096


def test_mesh_csv_rows_and_clamp(capsys, tmp_path):
    path = tmp_path / "m.csv"
    code, out, _ = run(capsys, "mesh", "--n-r", "8", "--n-theta", "16", "--t-cap", "2",
                       "--format", "csv", "--out", str(path))
    assert code == 0
    rows = path.read_text().splitlines()
    assert rows[0] == "u,v,T" and len(rows) == 8 * 16 + 1
    assert report(out)["diagnostics"]["clamp_count"] > 0


def test_psi(capsys):
    code, out, _ = run(capsys, "psi", "--theta", "0")
    assert code == 0 and abs(report(out)["outputs"]["psi"] - 0.5 * math.pi**2) < 1e-10
    code, out, _ = run(capsys, "psi", "--table", "5")
    assert code == 0 and len(report(out)["outputs"]["psi"]) == 5


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds")
    assert code == 0
    assert abs(report(out)["outputs"]["r_diamond"] - 0.067344733) < 1e-8


def test_solve_quad(capsys):
    code, out, _ = run(capsys, "solve-quad", "--w", "0,0")
    assert code == 0
    rep = report(out)
    assert abs(rep["outputs"]["curvature"] + 0.5 * math.pi**2) < 1e-8
    assert rep["diagnostics"]["residual_norm"] < 1e-10
    code, out, _ = run(capsys, "solve-quad", "--w", "0.97,0")
    assert code == 2


def test_solve_quad_with_seed(capsys):
    code, out, _ = run(capsys, "solve-quad", "--w", "0.1,0.5", "--seed-t", "1.45")
    assert code == 0
    assert report(out)["outputs"]["w"] == [0.1, 0.5]


def test_scan_csv(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "scan", "--grid", "3", "--rmax", "0.4", "--out", str(path))
    assert code == 0
    rows = path.read_text().splitlines()
    assert rows[0] == "re_w,im_w,c0,c1,status" and len(rows) == 10
    assert all(r.endswith(",ok") for r in rows[1:])
    assert report(out)["diagnostics"]["converged_fraction"] == 1.0


def test_scan_threads_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SCHERK_THREADS", "2")
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "scan", "--grid", "3", "--rmax", "0.4", "--out", str(p1))
    monkeypatch.setenv("SCHERK_THREADS", "1")
    run(capsys, "scan", "--grid", "3", "--rmax", "0.4", "--out", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_verify_bounds(capsys):
    code, out, err = run(capsys, "verify", "--suite", "bounds")
    assert code == 0
    assert "PASS bounds.r_diamond" in err
    assert report(out)["diagnostics"]["failed"] == []


def test_verify_family(capsys):
    code, _, err = run(capsys, "verify", "--suite", "family")
    assert code == 0 and "FAIL" not in err


def test_verify_tolerance_override_fails(capsys):
    code, out, err = run(capsys, "verify", "--suite", "bounds", "--tol", "hall_value=1e-9")
    assert code == 1
    assert "FAIL bounds.hall_value" in err
    assert report(out)["status"] == "fail"


def test_verify_all_broken_kappa(capsys, monkeypatch):
    real = family.kappa
    monkeypatch.setattr(family, "kappa", lambda t: 1.01 * real(t))
    code, out, err = run(capsys, "verify", "--suite", "all")
    assert code == 1
    assert "family.kappa_square" in report(out)["diagnostics"]["failed"]
    assert "FAIL family.kappa_square" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scherk.cli", "bounds"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "bounds"
