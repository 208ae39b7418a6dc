import math

import numpy as np
import pytest
from scipy.linalg import expm

from heunlab import monodromy as md
from heunlab import polysol as ps
from heunlab.odeint import StepUnderflow, dopri5
from heunlab.spectral import SurfaceSpec

Z = np.zeros((2, 2))


def test_dopri5_exponential():
    sol = dopri5(lambda t, y: -y, 0.0, 2.0, np.array([1.0]), rtol=1e-12, atol=1e-14, dense=True)
    assert abs(sol.y_end[0] - math.exp(-2)) < 1e-11
    assert abs(sol(0.7)[0] - math.exp(-0.7)) < 1e-9


def test_dopri5_underflow():
    with pytest.raises(StepUnderflow) as exc:
        dopri5(lambda t, y: y * y, 0.0, 2.0, np.array([1.0]), h_min=1e-10)
    assert exc.value.t_last < 1.0 + 1e-6


def test_scalar_circle():
    c = 0.37 + 0.1j
    spec = md.LinearSystemSpec.custom(Z, [[c, 0], [0, 0]], Z)
    r = md.monodromy_matrix(spec)
    assert abs(r.M[0, 0] - np.exp(2j * np.pi * c)) < 1e-11
    assert abs(r.M[1, 1] - 1) < 1e-12


def test_integer_residues_trivial():
    r = md.monodromy_matrix(md.LinearSystemSpec.custom(Z, np.diag([0, -1]), Z))
    assert np.allclose(r.M, np.eye(2), atol=1e-11)


def test_constant_segment_is_expm():
    N = np.array([[0.3, 1.0], [-0.4, 0.1j]])
    spec = md.LinearSystemSpec.custom(Z, Z, N)
    Y = md.integrate_linear(spec, [1.0, 2.5 + 0.5j], np.eye(2))
    assert np.allclose(Y, expm(N * (1.5 + 0.5j)), atol=1e-11)


def test_det_law():
    rng = np.random.default_rng(7)
    for _ in range(10):
        # moderate draws keep |M| small enough that det(M) is not lost to cancellation
        chi, a, s = 0.5 * (rng.normal(size=3) + 1j * rng.normal(size=3))
        r = md.monodromy_matrix(md.LinearSystemSpec.extended(0.3, chi, a, s))
        assert abs(r.det - np.exp(2j * np.pi * 0.3)) < 1e-8


def test_radius_invariance_of_trace():
    spec = md.LinearSystemSpec.extended(0.3, 0.2, 0.5 - 0.1j, 1.1)
    t1 = md.monodromy_matrix(spec, 1.0).trace
    t2 = md.monodromy_matrix(spec, 0.6).trace
    assert abs(t1 - t2) < 1e-9


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_unipotent_on_surface(ell):
    rng = np.random.default_rng(ell)
    for sign in ("plus", "minus"):
        spec = SurfaceSpec(ell, sign)
        for pt in ps.random_surface_points(spec, 2, rng):
            r = md.monodromy_matrix(md.LinearSystemSpec.extended(ell, pt.chi, pt.a, pt.s))
            assert abs(r.trace - 2) < 1e-6
            assert abs(r.det - 1) < 1e-8


def test_psi_system_and_stokes():
    c, r = md.stokes_product_check()
    assert abs(r.trace - 2) < 1e-6
    assert r.gap > 0.1
    assert abs(c + 4) < 1e-6


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_residue_quadrature(ell):
    assert abs(md.residue_quadrature(ell, 1.0) - md.residue_closed_form(ell, 1.0)) < 1e-10


def test_residue_values():
    assert abs(md.residue_closed_form(1, 1.0) - 1j * np.pi * np.exp(-0.5)) < 1e-15
    assert abs(md.residue_closed_form(2, 1.0) - 2j * np.pi * np.exp(-0.5) / 8) < 1e-15


def test_residue_spectral_convergence():
    exact = md.residue_closed_form(3, 2.0)
    errs = [abs(md.residue_quadrature(3, 2.0, n) - exact) for n in (4, 8, 16)]
    assert errs[1] < 1e-2 * errs[0] and errs[2] < 1e-4 * errs[1] + 1e-15


@pytest.mark.parametrize("kind", ["model0", "modelinf"])
def test_model_solutions(kind):
    z = [1.0, 1.2 + 0.3j, 0.8 - 0.2j]
    main, simple = md.model_solution_residual(kind, 1, 1.0, 1.0, z)
    assert main < 1e-8
    assert simple < 1e-14


def test_model_monodromy():
    M0 = md.model_monodromy("model0", 1, 1.0, 0.7)
    assert np.allclose(M0, [[1, 0], [0.7, 1]], atol=1e-8)
    Minf = md.model_monodromy("modelinf", 2, 1.0, 0.7)
    assert np.allclose(Minf, [[1, 0.7], [0, 1]], atol=1e-8)


def test_unknown_kind():
    with pytest.raises(ValueError):
        md.LinearSystemSpec("nope")
