import numpy as np
import pytest

from heunlab import josephson as js
from heunlab.josephson import TorusParams


def closed_form(B, omega=1.0):
    return np.sign(B) * np.sqrt(max(B * B - 1, 0)) / omega


def test_fixed_points_give_zero():
    est = js.rotation_number(TorusParams(0.0, 0.0))
    assert est.locked and est.rho == 0


@pytest.mark.parametrize("B", [1.5, 2.0, 3.0, -2.5])
def test_autonomous_closed_form(B):
    est = js.rotation_number(TorusParams(B, 0.0))
    assert abs(est.rho - closed_form(B)) <= est.bound
    assert est.lower <= closed_form(B) <= est.upper


def test_sqrt2_is_one():
    est = js.rotation_number(TorusParams(np.sqrt(2), 0.0))
    assert abs(est.rho - 1) <= est.bound + 1e-12


def test_sqrt3():
    est = js.rotation_number(TorusParams(2.0, 0.0))
    assert abs(est.rho - np.sqrt(3)) <= est.bound
    assert est.bound < 1e-2


def test_poincare_monotone():
    th = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    F = js.poincare_map(TorusParams(0.7, 1.3), th)
    assert np.all(np.diff(F) > 0)
    assert F[-1] < F[0] + 2 * np.pi


def test_lift_agrees_with_direct_integration():
    p = TorusParams(0.4, 2.1, 1.3)
    cmap = js.CircleMap([p.ell], [p.a], [p.s])
    th = np.array([[0.11, 1.9, 4.4]])
    assert np.max(np.abs(cmap(th) - js.poincare_map(p, th[0]))) < 1e-8


def test_plateau_is_integer():
    # B = 0.5, A = 1 sits inside the zero tongue
    est = js.rotation_number(TorusParams(0.5, 1.0))
    assert est.locked and est.rho == 0
    est = js.rotation_number(TorusParams(1.8, 2.0))
    if est.locked:
        assert est.rho == round(est.rho)


def test_vectorised_matches_scalar():
    B = np.array([[0.3, 1.7], [2.2, -1.1]])
    A = np.array([[0.0, 0.5], [1.0, 2.0]])
    rho, bound, _ = js.rotation_numbers(B, A)
    for i in range(2):
        for j in range(2):
            e = js.rotation_number(TorusParams(B[i, j], A[i, j]))
            assert abs(rho[i, j] - e.rho) <= bound[i, j] + e.bound


def test_scan_symmetry_and_csv():
    Bs = np.array([-1.5, -0.5, 0.5, 1.5])
    As = np.array([0.0, 1.0])
    rows = js.scan(Bs, As)
    by = {(B, A): (rho, bound) for B, A, rho, bound, _ in rows}
    for (B, A), (rho, bound) in by.items():
        r2, b2 = by[(-B, A)]
        assert abs(rho + r2) <= bound + b2
    text = js.scan_csv(rows)
    assert text.splitlines()[0] == "B,A,rho,bound,locked"
    assert text == js.scan_csv(js.scan(Bs, As, workers=2))
    assert "-0.0," not in text


def test_scan_parallel_matches_serial():
    Bs, As = np.array([0.2, 1.9]), np.array([0.0, 0.7, 1.4])
    assert js.scan(Bs, As, workers=2) == js.scan(Bs, As, workers=1)


def test_rational_lock():
    assert js.rational_lock(TorusParams(0.5, 1.0), 0, 1)
    assert not js.rational_lock(TorusParams(2.0, 0.0), 1, 1)


def test_parse_range():
    assert np.allclose(js.parse_range("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1])
    with pytest.raises(ValueError):
        js.parse_range("1:0:0.1")


@pytest.mark.parametrize("r,omega", [(1, 1.0), (2, 1.0), (1, 0.5)])
def test_growth_points(r, omega):
    assert abs(js.growth_point(r, omega) - js.growth_point_formula(r, omega)) < 1e-2


def test_growth_point_rejects_zero():
    with pytest.raises(ValueError):
        js.growth_point(0)


def test_riccati_consistency():
    assert js.riccati_consistency(TorusParams(0.7, 1.2, 1.1)) < 1e-8


def test_riccati_fixed_point():
    # theta = pi/2 is stationary when B = A = 0; Phi stays at i
    assert js.riccati_consistency(TorusParams(0.0, 0.0), theta0=np.pi / 2) < 1e-12


def test_workers_env(monkeypatch):
    monkeypatch.setenv("HEUNLAB_THREADS", "3")
    assert js.default_workers() == 3
