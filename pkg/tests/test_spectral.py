from fractions import Fraction

import numpy as np
import pytest

from heunlab import spectral as sp
from heunlab.ratpoly import MPoly, PolyMatrix

LM = sp.LM
CAS = sp.CAS
lam, mu = MPoly.gens(LM)
chi, a, s = MPoly.gens(CAS)
m_, r_ = MPoly.gens(sp.MR)


def test_H_examples():
    assert sp.build_H(1)[0, 0].is_zero()
    H2 = sp.build_H(2)
    assert H2[0, 0].is_zero() and H2[0, 1] == mu and H2[1, 0] == mu
    assert H2[1, 1] == MPoly.const(LM, -1)
    assert sp.build_H(3)[1, 1] == MPoly.const(LM, -2)


def test_Q_examples():
    assert sp.build_Q(1) == lam
    assert sp.build_Q(2) == lam ** 2 - lam - mu ** 2
    assert sp.build_Q(2).subst({"lam": 0}) == -(mu * mu)


def test_Gcal_examples():
    G2 = sp.build_Gcal(2)
    assert G2[0, 0].is_zero() and G2[0, 1] == mu and G2[1, 0] == mu and G2[1, 1] == MPoly.const(LM, -1)
    assert sp.build_Gcal(1)[0, 0] == mu
    assert sp.build_Gcal(3)[2, 1] == MPoly.const(LM, -1)


def test_Qpm_examples():
    assert sp.build_Qpm(1, "plus") == m_ + r_
    assert sp.build_Qpm(1, "minus") == m_ - r_
    assert sp.build_Qpm(2, "plus") == r_ * r_ - r_ - m_ * m_


def test_G1_G2_examples():
    G1 = sp.build_G1(1)
    assert G1[0, 0] == s * Fraction(1, 2) and G1[0, 1] == chi * a - 1
    assert G1[1, 0].is_zero() and G1[1, 1] == MPoly.const(CAS, Fraction(1, 2))
    G2 = sp.build_G2(1)
    assert G2[0, 0] == a * Fraction(1, 2) and G2[0, 1] == chi * s
    assert G2[1, 0] == chi and G2[1, 1].is_zero()
    assert sp.build_G2(2)[2, 0] == chi


def test_P_low_ell():
    assert sp.build_P(1, "plus") * 4 == (a + s) * (1 - chi * chi * 4) + chi * 4
    assert sp.build_P(1, "minus") * 4 == -((a - s) * (1 - chi * chi * 4) + chi * 4)
    D = ((chi * 2 + 1) ** 2 * (chi * 2 - 1) * (a * a - s * s) - a * (chi * 2 + 1) * (chi * 6 - 1) * 2 + chi * 16)
    c = sp.proportionality(sp.build_P(2, "plus"), D)
    assert abs(c) == Fraction(1, 8)


def test_P_matches_cofactor_determinant():
    from heunlab.ratpoly import det_cofactor
    for ell in (1, 2, 3):
        for sg in ("plus", "minus"):
            assert sp.build_P(ell, sg) == det_cofactor(sp.build_G(ell, sg))


@pytest.mark.parametrize("ell", range(1, 11))
def test_identity_suite(ell):
    for rep in sp.identity_suite(ell):
        assert rep.ok, rep.line()


def test_restriction_factor_and_wrong_branch():
    rep = sp.verify_restriction(1, "plus")
    assert rep.ok and rep.factor == Fraction(1, 2)
    assert sp.verify_restriction(2, "plus").ok and sp.verify_restriction(2, "minus").ok
    assert not sp.verify_restriction(1, "plus", q_sign="minus").ok


def test_factorization_ell1_by_hand():
    lhs = r_ * r_ - m_ * m_
    assert lhs == (m_ + r_) * (m_ - r_) * (-1)
    assert sp.verify_factorization(1).ok


@pytest.mark.parametrize("ell", [1, 2, 5])
def test_involution(ell):
    rep = sp.verify_involution(ell)
    assert rep.ok and rep.factor == 1


@pytest.mark.parametrize("ell", [1, 2])
@pytest.mark.parametrize("sign", ["plus", "minus"])
def test_display(ell, sign):
    assert sp.verify_display(ell, sign).ok


@pytest.mark.parametrize("sign,s_value", [("plus", 1), ("minus", 1), ("minus", 2), ("plus", 3)])
def test_branch_points(sign, s_value):
    rep = sp.verify_l2_discriminant(sign, s_value)
    assert rep.ok
    assert np.allclose(rep.extra["branch_points"], sp.branch_points_closed_form(sign, s_value), atol=1e-10)


def test_branch_point_values():
    assert np.allclose(sp.branch_points_closed_form("plus", 1), [(1 - 1j) / 2, (1 + 1j) / 2])
    assert np.allclose(sp.branch_points_closed_form("minus", 2), [-(1 + 0.5j) / 2, -(1 - 0.5j) / 2])


def test_quartic_factor_is_even():
    rep = sp.verify_l2_discriminant("plus", 1)
    roots = rep.extra["branch_points"]
    assert all(abs(z + 0.5) > 1e-6 for z in roots)


def test_genus_table():
    assert {l: sp.genus(l) for l in range(1, 7)} == {1: 0, 2: 0, 3: 0, 4: 1, 5: 2, 6: 4}


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_axis_value(ell):
    for sg in ("plus", "minus"):
        assert sp.p_at_origin(ell, sg) == s ** ell * Fraction(1, 2 ** (ell + 1))


def test_bad_ell():
    with pytest.raises(ValueError):
        sp.build_P(0, "plus")
    with pytest.raises(ValueError):
        sp.SurfaceSpec(1, "sideways")
