import json
import subprocess
import sys

import pytest

from liouville_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--n", "3", "--m", "1", "--a", "0", "--b", "0", "--p", "3", "--q", "3")
    assert code == 0 and out.strip() == "Subcritical"


def test_classify_exact_rational_boundary(capsys):
    # p = q = 7/3 with n = 4, m = 1 sits on the curve: 2*(4/(10/3)) = 12/5 != 2, so pick a true point
    code, out, _ = run(capsys, "classify", "--n", "3", "--m", "1", "--a", "1/2", "--b", "1/2", "--p", "6", "--q", "6")
    assert code == 0 and out.strip() == "Critical"


def test_usage_errors(capsys):
    assert run(capsys, "classify", "--n", "3")[0] == 1
    assert run(capsys, "classify", "--n", "3", "--m", "1", "--p", "1", "--q", "1")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "classify", "--n", "3", "--m", "1", "--p", "x", "--q", "2")[0] == 1
    assert run(capsys, "curve", "--n", "2", "--m", "1", "--p-lo", "3")[0] == 1


def test_numerical_failure_exit_code(capsys):
    code, _, err = run(capsys, "epsilon", "--n", "3", "--m", "1", "--p", "6", "--q", "6")
    assert code == 2 and "NotSubcritical" in err


def test_exponents_and_epsilon_json(capsys):
    code, out, _ = run(capsys, "exponents", "--n", "3", "--m", "1", "--p", "5", "--q", "5", "--json")
    assert code == 0 and json.loads(out)["alpha_u"] == pytest.approx(0.5)
    code, out, _ = run(capsys, "epsilon", "--n", "3", "--m", "1", "--p", "2", "--q", "2", "--json")
    cert = json.loads(out)
    assert code == 0 and min(cert["f1"], cert["f1_tilde"], cert["f2"]) > 0


def test_shoot_supercritical(capsys):
    code, out, _ = run(capsys, "shoot", "--n", "5", "--m", "1", "--p", "5", "--q", "5", "--rmax", "1e4")
    assert code == 0
    assert out.startswith("PositiveToRmax")
    slope = float(out.split("slope_u=")[1].split()[0])
    assert slope == pytest.approx(-0.5, rel=0.02)


def test_shoot_system_bracket(capsys):
    code, out, _ = run(capsys, "shoot", "--n", "3", "--m", "1", "--p", "2", "--q", "3", "--rmax", "1e3", "--bracket-lo", "0.1", "--bracket-hi", "10", "--json")
    assert code == 0 and json.loads(out)["kind"] == "SignChange"


def test_pohozaev_infers_gamma(capsys):
    code, out, _ = run(capsys, "pohozaev", "--n", "5", "--m", "2", "--p", "2", "--q", "3", "--radius", "2", "--lambda", "0.3", "--w0", "0.5", "0.3", "--z0", "0.4", "0.2")
    assert code == 0
    record = json.loads(out.strip().splitlines()[-1])
    assert record["lambda"] + record["gamma"] == pytest.approx(1.0)
    assert record["residual"] <= 1e-7


def test_poly_check(capsys):
    code, out, _ = run(capsys, "poly-check", "--cases", "40")
    assert code == 0
    assert out.splitlines() == ["commutator: PASS (40/40 exact zeros)", "bilinear: PASS (40/40 exact zeros)"]


def test_curve_stdout(capsys):
    code, out, _ = run(capsys, "curve", "--n", "3", "--m", "1", "--p-lo", "5")
    assert code == 0 and out.splitlines() == ["p,q_critical", "5,5"]


def test_scan_subcommand(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LIOUVILLE_LAB_OUT", str(tmp_path))
    cfg = tmp_path / "grid.cfg"
    cfg.write_text("n = 3\nm = 1\np_range = 2, 6\nq_range = 2, 6\nresolution = 2\noutput = grid.jsonl\n")
    code, out, _ = run(capsys, "scan", str(cfg))
    assert code == 0 and (tmp_path / "grid.jsonl").exists()
    before = (tmp_path / "grid.jsonl").read_bytes()
    assert run(capsys, "scan", str(cfg), "--resume")[0] == 0
    assert (tmp_path / "grid.jsonl").read_bytes() == before
    bad = tmp_path / "bad.cfg"
    bad.write_text("n = 3\nm = 1\np_range = 6, 2\nq_range = 2, 6\n")
    assert run(capsys, "scan", str(bad))[0] == 1


def test_scan_help_documents_format():
    out = subprocess.run([sys.executable, "-m", "liouville_lab", "scan", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for key in ("p_range", "resolution", "grid_index", "pohozaev_residual", "LIOUVILLE_LAB_OUT"):
        assert key in out.stdout
