import json
import subprocess
import sys

import pytest

from heunlab import cli
from heunlab.ratpoly import MPoly
from heunlab.spectral import build_P


def run(*argv):
    return subprocess.run([sys.executable, "-m", "heunlab", *argv], capture_output=True, text=True)


def test_parse_complex():
    assert cli.parse_complex("1.5") == 1.5
    assert cli.parse_complex("-3/4") == -0.75
    assert cli.parse_complex("0.3+0.2i") == 0.3 + 0.2j
    assert cli.parse_complex("-1-2i") == -1 - 2j
    assert cli.parse_complex("2i") == 2j


def test_fmt_complex_roundtrip():
    for z in (0.1 + 0.2j, -1e-300 - 3j, 1 / 3 + 0j):
        assert cli.parse_complex(cli.fmt_complex(z)) == z
    assert cli.fmt_complex(-0.0 - 0.0j) == "0.0+0.0i"


def test_surface_output(capsys):
    assert cli.main(["surface", "--ell", "1", "--sign", "plus"]) == 0
    P = MPoly.from_json(json.loads(capsys.readouterr().out))
    chi, a, s = MPoly.gens(P.vars)
    assert P * 4 == (a + s) * (1 - chi * chi * 4) + chi * 4


def test_surface_file_deterministic(tmp_path):
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["surface", "--ell", "3", "--sign", "minus", "--out", str(f1)])
    cli.main(["surface", "--ell", "3", "--sign", "minus", "--out", str(f2)])
    assert f1.read_bytes() == f2.read_bytes()
    assert MPoly.from_json(json.loads(f1.read_text())) == build_P(3, "minus")


def test_multiplier(capsys):
    cli.main(["multiplier", "--ell", "2", "--sign", "plus"])
    h = MPoly.from_json(json.loads(capsys.readouterr().out))
    chi, a, s = MPoly.gens(h.vars)
    assert h == 2 - a * (chi * 2 - 1)


def test_spectral(capsys):
    assert cli.main(["spectral", "--ell", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["vars"] == ["u", "v"]


def test_polysolve(capsys):
    assert cli.main(["polysolve", "--ell", "1", "--sign", "plus", "--chi", "1", "--s", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    c = [cli.parse_complex(x) for x in out["coeffs"]]
    assert abs(c[1] / c[0] + 2) < 1e-12
    assert float(out["residual"]) < 1e-12


def test_flow_csv(tmp_path):
    f = tmp_path / "flow.csv"
    assert cli.main(["flow", "--ell", "1", "--sign", "minus", "--chi0", "0", "--a0", "1",
                     "--s0", "1", "--s1", "2", "--out", str(f)]) == 0
    lines = f.read_text().splitlines()
    assert lines[0].startswith("s_re,s_im,chi_re")
    assert float(lines[-1].split(",")[0]) == pytest.approx(2.0)
    assert max(float(l.split(",")[-1]) for l in lines[1:]) < 1e-6


def test_monodromy_psi(capsys):
    cli.main(["monodromy", "--system", "psi"])
    out = json.loads(capsys.readouterr().out)
    assert abs(cli.parse_complex(out["trace"]) - 2) < 1e-6


def test_rho(capsys):
    assert cli.main(["rho", "--omega", "1", "--B", "1.4142", "--A", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(float(out["rho"]) - 1) < 1e-2


def test_scan_negative_range(tmp_path):
    f = tmp_path / "scan.csv"
    assert cli.main(["scan", "--omega", "1", "--B", "-1:1:1", "--A", "0:0.5:0.5", "--out", str(f)]) == 0
    rows = f.read_text().splitlines()
    assert rows[0] == "B,A,rho,bound,locked" and len(rows) == 7
    assert b"\r" not in f.read_bytes()


def test_verify_subprocess():
    p = run("verify", "--ell-max", "3")
    assert p.returncode == 0
    lines = p.stdout.splitlines()
    assert sum(l.startswith("PASS") for l in lines) >= 30
    assert not any(l.startswith("FAIL") for l in lines)


def test_parse_errors_exit_2():
    assert run("surface", "--ell", "1").returncode == 2
    assert run("surface", "--ell", "1", "--sign", "plus", "--bogus").returncode == 2
    assert run("rho", "--omega", "1", "--B", "x", "--A", "0").returncode == 2
    assert run("nosuch").returncode == 2


def test_off_surface_exit_1():
    p = run("polysolve", "--ell", "1", "--sign", "plus", "--chi", "0.5", "--s", "1")
    assert p.returncode == 1
