"""Vector-polynomial solutions of the extended linear system at surface points."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import SurfaceSpec, build_P, sign_name, sign_value

MEMBERSHIP_TOL = 1e-8
PIVOT_TOL = 1e-8


class NotOnSurface(ValueError):
    pass


class AmbiguousKernel(ValueError):
    pass


class DegenerateSlice(ValueError):
    pass


@dataclass(frozen=True)
class SurfacePoint:
    chi: complex
    a: complex
    s: complex
    spec: SurfaceSpec

    def __post_init__(self):
        for k in ("chi", "a", "s"):
            object.__setattr__(self, k, complex(getattr(self, k)))
        if self.s == 0:
            raise ValueError("s must be nonzero")

    @property
    def ell(self):
        return self.spec.ell

    def membership(self):
        return membership_residual(self.spec, self.chi, self.a, self.s)


@dataclass
class PolySolution:
    """Y2 = sum c_j z^j and Y1 = eps * z^ell * Y2(1/z)."""

    coeffs: np.ndarray
    sign: str
    pivot_ratio: float = 0.0
    second_pivot_ratio: float = 1.0

    @property
    def ell(self):
        return len(self.coeffs) - 1

    @property
    def y2(self):
        return np.asarray(self.coeffs, dtype=complex)

    @property
    def y1(self):
        return sign_value(self.sign) * self.y2[::-1]

    @property
    def degree(self):
        nz = [j for j in range(self.ell + 1) if self.y1[j] != 0 or self.y2[j] != 0]
        return max(nz) if nz else -1


def membership_residual(spec, chi, a, s):
    """|P(chi, a, s)| over the sum of absolute monomial values."""
    if spec.ell == 0:
        # planes chi = -+1/2 with the symmetry sign as label
        target = -spec.eps / 2
        return abs(chi - target) / (abs(chi) + 0.5)
    P = build_P(spec.ell, spec.sign)
    pt = (chi, a, s)
    scale = P.magnitude_sum(pt)
    return abs(P.eval(pt)) / scale if scale else 0.0


def system_matrices(ell, chi, a, s):
    """K, R, N of the extended system Y' = (K/z^2 + R/z + N) Y."""
    K = np.array([[-s / 2, -s * chi], [0, 0]], dtype=complex)
    R = np.array([[ell - chi * a, -a / 2], [a / 2, chi * a]], dtype=complex)
    N = np.array([[0, 0], [s * chi, s / 2]], dtype=complex)
    return K, R, N


def assemble_G(spec, point):
    """Numeric G1 +- G2 at (chi, a, s)."""
    ell, eps = spec.ell, spec.eps
    chi, a, s = complex(point.chi), complex(point.a), complex(point.s)
    if s == 0:
        raise ValueError("s must be nonzero")
    n = ell + 1
    G = np.zeros((n, n), dtype=complex)
    for i in range(ell):
        G[i, i] += s / 2
        G[i, i + 1] += chi * a - (i + 1)
        G[i, ell - 1 - i] += eps * a / 2
        G[i, ell - i] += eps * chi * s
    G[ell, ell] += 0.5
    G[ell, 0] += eps * chi
    return G


def full_pivot_kernel(G):
    """Null vector of a numerically rank-deficient matrix by complete pivoting.

    Returns (vector, pivot magnitudes in elimination order).
    """
    U = np.array(G, dtype=complex)
    n = U.shape[0]
    cols = np.arange(n)
    pivots = []
    for k in range(n):
        sub = np.abs(U[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        U[[k, i]] = U[[i, k]]
        U[:, [k, j]] = U[:, [j, k]]
        cols[[k, j]] = cols[[j, k]]
        p = U[k, k]
        pivots.append(abs(p))
        if p != 0 and k < n - 1:
            f = U[k + 1:, k] / p
            U[k + 1:, k:] -= np.outer(f, U[k, k:])
    # back-substitute treating the last pivot as zero
    x = np.zeros(n, dtype=complex)
    x[n - 1] = 1.0
    for k in range(n - 2, -1, -1):
        x[k] = -(U[k, k + 1:] @ x[k + 1:]) / U[k, k]
    v = np.zeros(n, dtype=complex)
    v[cols] = x
    return v, np.array(pivots)


def solve_polynomial_solution(spec, point, tol=MEMBERSHIP_TOL):
    if spec.ell == 0:
        if membership_residual(spec, point.chi, point.a, point.s) > tol:
            raise NotOnSurface(f"chi = {point.chi} is not on the plane of S_0,{spec.sign}")
        return PolySolution(np.array([1.0 + 0j]), spec.sign, 0.0, 1.0)
    m = membership_residual(spec, point.chi, point.a, point.s)
    if m > tol:
        raise NotOnSurface(f"relative |P| = {m:.3g} exceeds {tol:.1g}")
    G = assemble_G(spec, point)
    v, piv = full_pivot_kernel(G)
    ratios = piv / piv[0]
    small = int(np.sum(ratios < PIVOT_TOL))
    if small >= 2:
        raise AmbiguousKernel(f"{small} pivots below {PIVOT_TOL:g}: kernel is not one-dimensional")
    k = int(np.argmax(np.abs(v)))
    v = v / v[k]
    v[k] = 1.0
    return PolySolution(v, spec.sign, float(ratios[-1]), float(ratios[-2]) if len(ratios) > 1 else 1.0)


def _polyval(c, z):
    # c[j] is the coefficient of z^j
    return np.polyval(np.asarray(c)[::-1], z)


def _polyder(c):
    c = np.asarray(c)
    return c[1:] * np.arange(1, len(c)) if len(c) > 1 else np.zeros(1, dtype=c.dtype)


def unit_circle(n=8, phase=0.1):
    return np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n))


def system_residual(ell, chi, a, s, y1, y2, z_samples):
    """Max over z of |Y' - A Y| / (|Y'| + |A||Y|) for coefficient lists y1, y2."""
    K, R, N = system_matrices(ell, chi, a, s)
    d1, d2 = _polyder(y1), _polyder(y2)
    worst = 0.0
    for z in np.atleast_1d(z_samples):
        Y = np.array([_polyval(y1, z), _polyval(y2, z)])
        dY = np.array([_polyval(d1, z), _polyval(d2, z)])
        Az = K / z ** 2 + R / z + N
        r = np.linalg.norm(dY - Az @ Y)
        scale = np.linalg.norm(dY) + np.linalg.norm(Az, 2) * np.linalg.norm(Y)
        worst = max(worst, r / scale if scale else r)
    return worst


def verify_solution(spec, point, sol, z_samples=None):
    z = unit_circle() if z_samples is None else z_samples
    return system_residual(spec.ell, point.chi, point.a, point.s, sol.y1, sol.y2, z)


def slice_coefficients(spec, chi, s):
    """Coefficients (highest first) of a -> P(chi, a, s)."""
    P = build_P(spec.ell, spec.sign)
    parts = P.coefficients_in("a")
    deg = max(parts)
    return np.array([parts[k].eval((chi, 0, s)) if k in parts else 0j for k in range(deg, -1, -1)])


def sample_surface(spec, chi, s, tol=MEMBERSHIP_TOL):
    """All points of the surface with the given chi and s, polished by Newton steps."""
    chi, s = complex(chi), complex(s)
    if s == 0:
        raise ValueError("s must be nonzero")
    if spec.ell == 0:
        raise DegenerateSlice("the ell = 0 surfaces are planes in chi; every a is allowed")
    c = slice_coefficients(spec, chi, s)
    big = np.max(np.abs(c))
    if big == 0:
        raise DegenerateSlice("slice polynomial vanishes identically")
    nz = np.nonzero(np.abs(c) > 1e-14 * big)[0]
    c = c[nz[0]:]
    if len(c) < 2:
        return []
    roots = np.roots(c)
    dc = np.polyder(c)
    pts = []
    for r in roots:
        for _ in range(2):
            d = np.polyval(dc, r)
            if d != 0:
                r = r - np.polyval(c, r) / d
        pt = SurfacePoint(chi, r, s, spec)
        if pt.membership() <= tol:
            pts.append(pt)
    return pts


def random_surface_points(spec, n, rng, chi_scale=1.0, s_range=(0.5, 2.0)):
    """At least n surface points from random complex (chi, s) slices."""
    pts = []
    while len(pts) < n:
        chi = complex(rng.normal(0, chi_scale), rng.normal(0, chi_scale))
        s = rng.uniform(*s_range) * np.exp(1j * rng.uniform(-0.5, 0.5))
        pts.extend(sample_surface(spec, chi, s))
    return pts[:n]


def heun_residual(ell, lam, mu, E_coeffs, z_samples):
    """Relative residual of z^2 E'' + ((1-ell) z + mu (1-z^2)) E' + (lam + mu (ell-1) z) E."""
    E = np.asarray(E_coeffs, dtype=complex)
    if not np.any(E):
        raise ValueError("E must be nonzero")
    d1 = _polyder(E)
    d2 = _polyder(d1)
    worst = 0.0
    for z in np.atleast_1d(z_samples):
        t2 = z * z * _polyval(d2, z)
        t1 = ((1 - ell) * z + mu * (1 - z * z)) * _polyval(d1, z)
        t0 = (lam + mu * (ell - 1) * z) * _polyval(E, z)
        scale = abs(t2) + abs(t1) + abs(t0)
        r = abs(t2 + t1 + t0)
        worst = max(worst, r / scale if scale else r)
    return worst


def heun_parameters(a, s):
    """(lam, mu) attached to a point with chi = 0."""
    mu = s / 2
    return a * a / 4 - mu * mu, mu


def system_from_heun(E_coeffs, a, mu, ell, z_samples=None):
    """Y1 = (2z/a)(E' - mu E), Y2 = E; returns (y1, y2, residual of the chi = 0 system)."""
    E = np.asarray(E_coeffs, dtype=complex)
    if a == 0:
        raise ValueError("a must be nonzero")
    if not np.any(E):
        raise ValueError("E must be nonzero")
    n = max(len(E), ell + 1)
    y2 = np.zeros(n, dtype=complex)
    y2[:len(E)] = E
    d = np.zeros(n, dtype=complex)
    d[:len(E) - 1] = _polyder(E)[:len(E) - 1] if len(E) > 1 else 0
    inner = d - mu * y2
    y1 = np.zeros(n + 1, dtype=complex)
    y1[1:] = (2 / a) * inner
    y1 = y1[:n] if not y1[n] else y1
    z = unit_circle() if z_samples is None else z_samples
    m = max(len(y1), len(y2))
    y1 = np.pad(y1, (0, m - len(y1)))
    y2 = np.pad(y2, (0, m - len(y2)))
    res = system_residual(ell, 0, a, 2 * mu, y1, y2, z)
    return y1, y2, res
