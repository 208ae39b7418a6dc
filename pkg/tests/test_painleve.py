from fractions import Fraction

import numpy as np
import pytest

from heunlab import painleve as pl
from heunlab import polysol as ps
from heunlab.ratpoly import MPoly
from heunlab.spectral import CAS, SurfaceSpec, build_P

chi, a, s = MPoly.gens(CAS)


def test_v_field_examples():
    assert pl.v_field(1, 0, 1, 1) == (Fraction(1, 2), -1, 1)
    assert pl.v_field(3, 0, 0, 2.5) == (0, 0, 2.5)


def test_field_matches_isomonodromic_rhs():
    rng = np.random.default_rng(3)
    for _ in range(10):
        ell, c, aa, ss = rng.normal(size=4) + 1j * rng.normal(size=4)
        vc, va, vs = pl.v_field(ell, c, aa, ss)
        dc, da = pl.isomonodromic_rhs(ell, c, aa, ss)
        assert abs(vc / vs - dc) < 1e-12 * (1 + abs(dc))
        assert abs(va / vs - da) < 1e-12 * (1 + abs(da))


def test_lie_derivative_examples():
    assert pl.lie_derivative(s, 2) == s
    assert pl.lie_derivative(MPoly.const(CAS, 5), 2).is_zero()
    P = build_P(1, "plus") * 4
    assert pl.lie_derivative(P, 1) == (1 - chi * (a + s) * 2) * P


def test_multiplier_closed_forms():
    assert pl.multiplier(SurfaceSpec(1, "plus")) == 1 - chi * (a + s) * 2
    assert pl.multiplier(SurfaceSpec(1, "minus")) == 1 - chi * (a - s) * 2
    assert pl.multiplier(SurfaceSpec(2, "plus")) == 2 - a * (chi * 2 - 1)
    assert pl.multiplier(SurfaceSpec(2, "minus")) == 2 - a * (chi * 2 + 1)


@pytest.mark.parametrize("ell", range(1, 9))
def test_tangency(ell):
    for sg in ("plus", "minus"):
        h = pl.multiplier(SurfaceSpec(ell, sg))
        assert h.degree() <= 2


def test_flow_s1_minus_conserves():
    spec = SurfaceSpec(1, "minus")
    traj = pl.flow(pl.FlowState(0, 1, 1, 1), 2, spec=spec)
    assert traj.membership()[-1] < 1e-6
    assert abs(traj.s[-1] - 2) < 1e-14


def test_flow_reversible():
    spec = SurfaceSpec(1, "minus")
    fwd = pl.flow(pl.FlowState(0, 1, 1, 1), 2, spec=spec)
    back = pl.flow(fwd.end, 1, spec=spec)
    assert abs(back.chi[-1]) < 1e-9 and abs(back.a[-1] - 1) < 1e-9


def test_flow_off_surface_keeps_ell():
    traj = pl.flow(pl.FlowState(0.3, 0.2, 1, 2), 1.5)
    assert traj.ell == 2


def test_flow_polyline():
    spec = SurfaceSpec(1, "minus")
    traj = pl.flow(pl.FlowState(0, 1, 1, 1), 2, path=[1 + 0.5j], spec=spec)
    radial = pl.flow(pl.FlowState(0, 1, 1, 1), 2, spec=spec)
    assert abs(traj.chi[-1] - radial.chi[-1]) < 1e-8
    with pytest.raises(ValueError):
        pl.flow(pl.FlowState(0, 1, 1, 1), -1, path=[0])


def s3_start():
    spec = SurfaceSpec(3, "plus")
    pts = sorted((p for p in ps.sample_surface(spec, 1, 1) if abs(p.a.imag) < 1e-12), key=lambda p: p.a.real)
    for p in pts:
        try:
            return spec, p, pl.flow(pl.FlowState(p.chi, p.a.real, 1, 3), 2, spec=spec)
        except pl.FlowError:
            continue
    raise AssertionError("no regular real start point")


def test_p3_residual_and_convergence():
    spec, _, traj = s3_start()
    assert np.max(traj.membership()) < 1e-6
    r1, _ = pl.p3_residual(traj, 0.05)
    r2, _ = pl.p3_residual(traj, 0.025)
    assert r2 < 1e-4
    assert 11.2 < r1 / r2 < 20.8


def test_p3_residual_fake_data():
    s_grid = np.linspace(1, 2, 41)
    w = np.full_like(s_grid, 0.7)
    assert pl.p3_residual_from_samples(3, s_grid, w, s_grid[1] - s_grid[0]) > 0.1


def test_hamiltonian_conventions():
    prime = pl.flow(pl.FlowState(0.1, 0.7, 1, 1), 1.5, variant="prime")
    plain = pl.flow(pl.FlowState(0.1, 0.7, 1, 1), 1.5, variant="plain")
    bp, dp, _ = pl.hamiltonian_convention(prime)
    bq, dq, _ = pl.hamiltonian_convention(plain)
    assert dp < 1e-8 and dq < 1e-8
    assert bp[0] == bq[0] and bp[1] == -bq[1]


def test_hamiltonian_at_zero_field_point():
    g = pl.hamiltonian_gradient(2, 0, 0, 1.3)
    assert g == (0, 0)


def test_riccati_l1_matches_flow():
    s_vals, chi_vals, a_vals = pl.riccati_l1(0, 1, 2)
    assert abs(a_vals[0] - 1) < 1e-15
    traj = pl.flow(pl.FlowState(0, 1, 1, 1), 2)
    c, aa = traj.at(s_vals)
    assert np.max(np.abs(c - chi_vals)) < 1e-8
    assert np.max(np.abs(aa - a_vals)) < 1e-8


@pytest.mark.parametrize("plane", [0.5, -0.5])
def test_riccati_l0_on_plane(plane):
    s_vals, a_vals = pl.riccati_l0(0.3, 1, 1.5, plane=plane)
    traj = pl.flow(pl.FlowState(plane, 0.3, 1, 0), 1.5)
    c, aa = traj.at(s_vals)
    assert np.max(np.abs(c - plane)) < 1e-12
    assert np.max(np.abs(aa - a_vals)) < 1e-8
