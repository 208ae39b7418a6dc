"""Tridiagonal and determinantal matrices, their determinant polynomials, and
exact checks of the algebraic identities relating them."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ratpoly import MPoly, PolyMatrix, NotDivisible, div_exact, discriminant, resultant, squarefree_factors

LM = ("lam", "mu")
UV = ("u", "v")
CAS = ("chi", "a", "s")
MR = ("mu", "r")

PLUS, MINUS = "plus", "minus"


class InternalInconsistency(RuntimeError):
    """A construction failed one of its built-in algebraic postconditions."""


def sign_value(sign):
    if sign in (PLUS, "+", 1):
        return 1
    if sign in (MINUS, "-", -1):
        return -1
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def sign_name(sign):
    return PLUS if sign_value(sign) == 1 else MINUS


@dataclass(frozen=True)
class SurfaceSpec:
    ell: int
    sign: str = PLUS

    def __post_init__(self):
        if not isinstance(self.ell, int) or self.ell < 0:
            raise ValueError("ell must be a non-negative integer")
        object.__setattr__(self, "sign", sign_name(self.sign))

    @property
    def eps(self):
        return sign_value(self.sign)


@dataclass
class IdentityReport:
    name: str
    ell: int
    status: str
    factor: Fraction = None
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.status == "exact-pass"

    def line(self):
        tag = "PASS" if self.ok else "FAIL"
        f = "" if self.factor is None else f" factor={self.factor}"
        d = f" {self.detail}" if self.detail else ""
        return f"{tag} {self.name} ell={self.ell}{f}{d}"


def _check_ell(ell):
    if not isinstance(ell, int) or ell < 1:
        raise ValueError("ell must be a positive integer")


def _pass(name, ell, factor=None, detail="", **extra):
    return IdentityReport(name, ell, "exact-pass", factor, detail, extra)


def _fail(name, ell, detail, **extra):
    return IdentityReport(name, ell, "fail", None, detail, extra)


def proportionality(p, q):
    """Return the rational c with p == c*q, or None."""
    if q.is_zero():
        return None if not p.is_zero() else Fraction(0)
    e, cq = q.leading()
    c = Fraction(p.coeff(e)) / cq
    if c and p == q * c:
        return c
    return None


def first_difference(p, q):
    d = p - q
    if d.is_zero():
        return None
    e, c = d.leading()
    return f"first differing monomial {dict(zip(d.vars, e))} (difference {c})"


# matrices

def build_H(ell):
    """ell x ell tridiagonal matrix over (lam, mu)."""
    _check_ell(ell)
    mu = MPoly.var(LM, "mu")
    zero = MPoly.zero(LM)
    rows = [[zero] * ell for _ in range(ell)]
    for j in range(1, ell + 1):
        rows[j - 1][j - 1] = MPoly.const(LM, (1 - j) * (ell - j + 1))
        if j < ell:
            rows[j - 1][j] = mu * j
        if j > 1:
            rows[j - 1][j - 2] = mu * (ell - j + 1)
    return PolyMatrix(rows)


@lru_cache(maxsize=None)
def build_Q(ell):
    """det(H + lam*Id) over (lam, mu), checked to be even in mu of degree ell in (lam, mu^2)."""
    _check_ell(ell)
    lam = MPoly.var(LM, "lam")
    M = build_H(ell) + PolyMatrix.identity(LM, ell).map(lambda x: x * lam)
    Q = M.det()
    if any(e[1] % 2 for e in Q.terms):
        raise InternalInconsistency(f"Q_{ell} has odd powers of mu")
    if max(e[0] + e[1] // 2 for e in Q.terms) != ell:
        raise InternalInconsistency(f"Q_{ell} has wrong weighted degree")
    return Q


def to_uv(Q):
    """Rewrite an even-in-mu polynomial over (lam, mu) as one over (u, v) = (lam, mu^2)."""
    terms = {}
    for (i, j), c in Q.terms.items():
        if j % 2:
            raise ValueError("odd power of mu")
        terms[(i, j // 2)] = c
    return MPoly(UV, terms)


def build_Gcal(ell, vars=LM):
    """ell x ell matrix squaring to mu^2 Id - H; ``vars`` must contain 'mu'."""
    _check_ell(ell)
    vars = tuple(vars)
    mu = MPoly.var(vars, "mu")
    zero = MPoly.zero(vars)
    rows = [[zero] * ell for _ in range(ell)]
    for i in range(1, ell + 1):
        rows[i - 1][ell - i] = mu
        if i >= 2:
            rows[i - 1][ell + 1 - i] = MPoly.const(vars, -(ell + 1 - i))
    G = PolyMatrix(rows)
    if vars == LM:
        _gate_gcal(G, ell)
    return G


def _gate_gcal(G, ell):
    mu = MPoly.var(LM, "mu")
    rhs = PolyMatrix.identity(LM, ell).map(lambda x: x * mu * mu) - build_H(ell)
    if not (G @ G) == rhs:
        raise InternalInconsistency(f"Gcal_{ell}^2 != mu^2 Id - H_{ell}")


def check_gcal_square(ell):
    G = build_Gcal(ell, vars=("lam", "mu"))
    mu = MPoly.var(LM, "mu")
    rhs = PolyMatrix.identity(LM, ell).map(lambda x: x * mu * mu) - build_H(ell)
    if (G @ G) == rhs:
        return _pass("gcal-square", ell)
    return _fail("gcal-square", ell, "entrywise mismatch")


@lru_cache(maxsize=None)
def build_Qpm(ell, sign):
    """det(Gcal +- r Id) over (mu, r)."""
    eps = sign_value(sign)
    G = build_Gcal(ell, vars=MR)
    r = MPoly.var(MR, "r")
    return (G + PolyMatrix.identity(MR, ell).map(lambda x: x * r * eps)).det()


def build_G1(ell):
    _check_ell(ell)
    chi, a, s = MPoly.gens(CAS)
    zero = MPoly.zero(CAS)
    n = ell + 1
    rows = [[zero] * n for _ in range(n)]
    for i in range(ell):
        rows[i][i] = s * Fraction(1, 2)
        rows[i][i + 1] = chi * a - (i + 1)
    rows[ell][ell] = MPoly.const(CAS, Fraction(1, 2))
    return PolyMatrix(rows)


def build_G2(ell):
    _check_ell(ell)
    chi, a, s = MPoly.gens(CAS)
    zero = MPoly.zero(CAS)
    n = ell + 1
    rows = [[zero] * n for _ in range(n)]
    for r in range(ell):
        rows[r][ell - 1 - r] = a * Fraction(1, 2)
        rows[r][ell - r] = chi * s
    rows[ell][0] = chi
    return PolyMatrix(rows)


def build_G(ell, sign):
    G2 = build_G2(ell)
    return build_G1(ell) + (G2 if sign_value(sign) == 1 else G2.scale(-1))


@lru_cache(maxsize=None)
def build_P(ell, sign):
    """Surface polynomial det(G1 +- G2) over (chi, a, s) with degree checks."""
    _check_ell(ell)
    P = build_G(ell, sign).det()
    ok, info = _degree_profile(P, ell)
    if not ok:
        raise InternalInconsistency(f"P_{ell},{sign}: {info}")
    R = restrict(P, chi=0, s=0)
    e, c = R.leading()
    if e != (0, ell, 0) or abs(Fraction(c)) != Fraction(1, 2 ** (ell + 1)):
        raise InternalInconsistency(f"P_{ell},{sign}(0,a,0) has top term {c}*{e}")
    return P


def restrict(P, **values):
    """Substitute rational values for some of (chi, a, s), keeping the same variables."""
    return P.subst({k: v for k, v in values.items()})


def genus(ell):
    _check_ell(ell)
    if ell % 2 == 0:
        return ((ell - 2) // 2) ** 2
    return (ell - 1) * (ell - 3) // 4


# identity checks

def verify_factorization(ell):
    Q = build_Q(ell)
    mu, r = MPoly.gens(MR)
    lhs = Q.subst({"lam": r * r - mu * mu}, new_vars=MR)
    rhs = build_Qpm(ell, PLUS) * build_Qpm(ell, MINUS) * (-1) ** ell
    diff = first_difference(lhs, rhs)
    if diff is None:
        return _pass("factorization", ell)
    return _fail("factorization", ell, diff)


def restricted_Qpm(ell, sign):
    """Q_{ell,+-}(mu -> s/2, r -> a/2) as a polynomial over (chi, a, s)."""
    _, a, s = MPoly.gens(CAS)
    return build_Qpm(ell, sign).subst({"mu": s * Fraction(1, 2), "r": a * Fraction(1, 2)}, new_vars=CAS)


def verify_restriction(ell, sign, q_sign=None):
    q_sign = sign if q_sign is None else q_sign
    P0 = restrict(build_P(ell, sign), chi=0)
    Q = restricted_Qpm(ell, q_sign)
    c = proportionality(P0, Q)
    name = f"restriction[{sign_name(sign)}]"
    if c:
        return _pass(name, ell, c)
    return _fail(name, ell, f"P(0,a,s) not a multiple of Q_{sign_name(q_sign)}(s/2,a/2)")


def verify_involution(ell):
    chi, a, s = MPoly.gens(CAS)
    Pm = build_P(ell, MINUS)
    Pp_flip = build_P(ell, PLUS).subst({"chi": -chi, "a": -a})
    for eps in (1, -1):
        if Pm == Pp_flip * eps:
            return _pass("involution", ell, Fraction(eps))
    return _fail("involution", ell, "neither sign relates P- and P+(-chi,-a,s)")


def closed_form_display(ell, sign):
    """Closed-form displays for ell = 1, 2 (scaled by 4 and 8 respectively)."""
    e = sign_value(sign)
    chi, a, s = MPoly.gens(CAS)
    if ell == 1:
        return (a + s * e) * (1 - chi * chi * 4) + chi * 4
    if ell == 2:
        return ((chi * 2 + e) ** 2 * (chi * 2 - e) * (a * a - s * s)
                - a * (chi * 2 + e) * (chi * 6 - e) * 2 + chi * 16)
    raise ValueError("closed-form display only for ell = 1, 2")


def verify_display(ell, sign):
    scale = {1: 4, 2: 8}[ell]
    P = build_P(ell, sign) * scale
    D = closed_form_display(ell, sign)
    name = f"display[{sign_name(sign)}]"
    for eps in (1, -1):
        if P == D * eps:
            return _pass(name, ell, Fraction(eps))
    return _fail(name, ell, first_difference(P, D))


def l2_discriminant_target(sign):
    e = sign_value(sign)
    chi, _, s = MPoly.gens(CAS)
    return (chi * 2 + e) ** 4 * (s * s * (chi * 2 - e) ** 2 + 1)


def verify_l2_discriminant(sign, s_value=1):
    """Discriminant of P_{2,+-} in a against its factored form, plus branch points.

    The Sylvester resultant Res_a(P, dP/da) equals -lc_a(P) times the
    discriminant; the leading coefficient is divided out exactly so that the
    degree drop in ``a`` does not masquerade as a branch point.
    """
    P = build_P(2, sign)
    res = resultant(P, P.diff("a"), "a")
    disc = discriminant(P, "a")
    lc = P.coefficients_in("a")[2]
    name = f"l2-discriminant[{sign_name(sign)}]"
    if res != -(lc * disc):
        return _fail(name, 2, "resultant is not -lc*disc")
    c = proportionality(disc, l2_discriminant_target(sign))
    if not c:
        return _fail(name, 2, "discriminant not proportional to factored form")
    pts = odd_multiplicity_roots(disc, s_value)
    return _pass(name, 2, c, branch_points=pts, resultant=res, discriminant=disc)


def odd_multiplicity_roots(disc, s_value):
    """Roots in chi of odd multiplicity of disc(chi, s=s_value)."""
    d = disc.subst({"s": s_value, "a": 0}, new_vars=CAS)
    uni = MPoly(("chi",), {(e[0],): c for e, c in d.terms.items()})
    roots = []
    for f, m in squarefree_factors(uni):
        if m % 2:
            coeffs = [float(f.coeff((k,))) for k in range(f.degree(), -1, -1)]
            roots.extend(np.roots(coeffs).tolist())
    return sorted(roots, key=lambda z: (round(z.real, 12), z.imag))


def branch_points_closed_form(sign, s_value):
    """Closed-form branch points chi = +-(1 +- i/s)/2 of the ell = 2 surface slices."""
    e = sign_value(sign)
    return sorted([e * 0.5 * (1 + 1j / s_value), e * 0.5 * (1 - 1j / s_value)],
                  key=lambda z: (round(z.real, 12), z.imag))


def p_at_origin(ell, sign):
    """P(0, 0, s) as a polynomial in s (over chi, a, s)."""
    return restrict(build_P(ell, sign), chi=0, a=0)


def _degree_profile(P, ell):
    # total degree in (chi, a, s) and, with s frozen, a unique top monomial in (chi, a)
    deg = P.degree()
    deg_ca = max(e[0] + e[1] for e in P.terms)
    tops = [e for e in P.terms if e[0] + e[1] == deg_ca]
    ok = deg == 2 * ell + 1 and deg_ca == 2 * ell + 1 and tops == [(ell + 1, ell, 0)]
    return ok, f"degree {deg}, degree in (chi, a) {deg_ca}, top monomials {tops}"


def check_degree(ell, sign):
    P = build_P(ell, sign)
    ok, info = _degree_profile(P, ell)
    name = f"degree[{sign_name(sign)}]"
    if ok:
        return _pass(name, ell, Fraction(P.terms[(ell + 1, ell, 0)]))
    return _fail(name, ell, info)


def check_axis_value(ell, sign):
    s = MPoly.var(CAS, "s")
    target = s ** ell * Fraction(1, 2 ** (ell + 1))
    got = p_at_origin(ell, sign)
    name = f"axis-value[{sign_name(sign)}]"
    for eps in (1, -1):
        if got == target * eps:
            return _pass(name, ell, Fraction(eps))
    return _fail(name, ell, first_difference(got, target))


def identity_suite(ell):
    reports = [check_gcal_square(ell), verify_factorization(ell)]
    for sg in (PLUS, MINUS):
        reports.append(verify_restriction(ell, sg))
        reports.append(check_degree(ell, sg))
        reports.append(check_axis_value(ell, sg))
    reports.append(verify_involution(ell))
    return reports
