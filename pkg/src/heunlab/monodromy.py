"""Transport of 2x2 linear systems Y' = (K/z^2 + R/z + N) Y along complex paths,
monodromy matrices, and quadrature checks of the explicit model solutions."""

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.integrate import quad

from .odeint import dopri5

KINDS = ("extended", "torus", "psi", "model0", "modelinf", "custom")
ALIASES = {}
N_ARCS = 64


@dataclass(frozen=True)
class LinearSystemSpec:
    kind: str
    params: tuple = ()

    @classmethod
    def extended(cls, ell, chi, a, s):
        return cls("extended", (("ell", ell), ("chi", chi), ("a", a), ("s", s)))

    @classmethod
    def torus(cls, ell, a, s):
        return cls("torus", (("ell", ell), ("a", a), ("s", s)))

    @classmethod
    def psi(cls):
        return cls("psi")

    @classmethod
    def model0(cls, ell, s, u):
        return cls("model0", (("ell", ell), ("s", s), ("u", u)))

    @classmethod
    def modelinf(cls, ell, s, u):
        return cls("modelinf", (("ell", ell), ("s", s), ("u", u)))

    @classmethod
    def custom(cls, K, R, N):
        f = lambda m: tuple(map(tuple, np.asarray(m, dtype=complex)))
        return cls("custom", (("K", f(K)), ("R", f(R)), ("N", f(N))))

    def __post_init__(self):
        kind = ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)

    @property
    def p(self):
        return dict(self.params)

    def matrices(self):
        p = self.p
        k = self.kind
        if k == "extended":
            ell, chi, a, s = (complex(p[x]) for x in ("ell", "chi", "a", "s"))
            K = [[-s / 2, -s * chi], [0, 0]]
            R = [[ell - chi * a, -a / 2], [a / 2, chi * a]]
            N = [[0, 0], [s * chi, s / 2]]
        elif k == "torus":
            ell, a, s = (complex(p[x]) for x in ("ell", "a", "s"))
            K = [[-s / 2, 0], [0, 0]]
            R = [[-ell, -a / 2], [a / 2, 0]]
            N = [[0, 0], [0, s / 2]]
        elif k == "psi":
            K = [[0, 0], [0, 0]]
            R = [[0, 0], [0, -1]]
            N = [[0, 2], [0.5, 0]]
        elif k == "model0":
            ell, s, u = (complex(p[x]) for x in ("ell", "s", "u"))
            K = [[-s / 2, 0], [0, 0]]
            R = [[ell, 0], [u * d_ell(int(ell.real), s), 0]]
            N = [[0, 0], [0, 0]]
        elif k == "modelinf":
            ell, s, u = (complex(p[x]) for x in ("ell", "s", "u"))
            K = [[0, 0], [0, 0]]
            R = [[ell, u * d_ell(int(ell.real), s)], [0, 0]]
            N = [[0, 0], [0, s / 2]]
        else:
            K, R, N = p["K"], p["R"], p["N"]
        return tuple(np.array(m, dtype=complex) for m in (K, R, N))

    def coefficient(self, z):
        K, R, N = self.matrices()
        return K / z ** 2 + R / z + N


@dataclass(frozen=True)
class Arc:
    """Circular arc z = radius * exp(i theta), theta from theta0 to theta1."""
    radius: float
    theta0: float
    theta1: float

    def start(self):
        return self.radius * np.exp(1j * self.theta0)

    def end(self):
        return self.radius * np.exp(1j * self.theta1)


@dataclass
class MonodromyResult:
    M: np.ndarray
    trace: complex
    det: complex
    gap: float


def _transport_arc(K, R, N, arc, Y, tol):
    r = arc.radius

    def f(t, y):
        z = r * np.exp(1j * t)
        A = K / (z * z) + R / z + N
        return 1j * z * (A @ y)

    return dopri5(f, arc.theta0, arc.theta1, Y, rtol=tol, atol=tol, record=False).y_end


def _transport_segment(K, R, N, z0, z1, Y, tol):
    d = z1 - z0

    def f(t, y):
        z = z0 + t * d
        A = K / (z * z) + R / z + N
        return d * (A @ y)

    return dopri5(f, 0.0, 1.0, Y, rtol=tol, atol=tol, record=False).y_end


def integrate_linear(spec, path, Y0, tol=1e-12):
    """Transport Y0 (vector or fundamental matrix) along a path.

    ``path`` is a sequence whose items are complex vertices (joined by straight
    segments) or ``Arc`` pieces; consecutive pieces must join up.
    """
    K, R, N = spec.matrices()
    Y = np.array(Y0, dtype=complex)
    here = None
    for piece in path:
        if isinstance(piece, Arc):
            if here is not None and abs(here - piece.start()) > 1e-12 * max(1, abs(here)):
                Y = _transport_segment(K, R, N, here, piece.start(), Y, tol)
            Y = _transport_arc(K, R, N, piece, Y, tol)
            here = piece.end()
        else:
            z = complex(piece)
            if z == 0:
                raise ValueError("path must avoid z = 0")
            if here is not None and z != here:
                Y = _transport_segment(K, R, N, here, z, Y, tol)
            here = z
    return Y


def circle_path(radius, n_arcs=N_ARCS, start=0.0):
    edges = start + 2 * np.pi * np.arange(n_arcs + 1) / n_arcs
    return [Arc(radius, t0, t1) for t0, t1 in zip(edges[:-1], edges[1:])]


def monodromy_matrix(spec, radius=1.0, tol=1e-12, n_arcs=N_ARCS):
    """Counterclockwise monodromy of the standard basis based at z = radius."""
    M = integrate_linear(spec, circle_path(radius, n_arcs), np.eye(2), tol)
    return MonodromyResult(M, complex(np.trace(M)), complex(np.linalg.det(M)),
                           float(np.linalg.norm(M - np.eye(2), 2)))


def stokes_product_check(tol=1e-12, radius=1.0):
    """c0*c1 = -(tr M + 2) from the monodromy of the psi-system (expected -4)."""
    res = monodromy_matrix(LinearSystemSpec.psi(), radius, tol)
    return -(res.trace + 2), res


# model systems

def d_ell(ell, s):
    return factorial(ell) / (2j * np.pi) * (2 / s) ** ell * np.exp(s / 2)


def residue_closed_form(ell, s):
    return 2j * np.pi * np.exp(-s / 2) * (s / 2) ** ell / factorial(ell)


def residue_quadrature(ell, s, n_nodes=256):
    """Trapezoid rule for the loop integral of z^(ell-1) exp(s/2 (1/z - 1)) over |z| = 1."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if s == 0:
        raise ValueError("s must be nonzero")
    z = np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    vals = z ** ell * np.exp(s / 2 * (1 / z - 1))
    return complex(2j * np.pi * np.mean(vals))


def _cquad(f, a, b, tol):
    re = quad(lambda t: f(t).real, a, b, epsabs=tol, epsrel=tol, limit=400)[0]
    im = quad(lambda t: f(t).imag, a, b, epsabs=tol, epsrel=tol, limit=400)[0]
    return complex(re, im)


def _truncation_radius(mag, lo, hi, floor=1e-18):
    # monotone search for where |integrand| drops below floor
    if mag(lo) >= floor:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mag(mid) < floor:
            lo = mid
        else:
            hi = mid
    return lo


class ModelSolution:
    """Explicit canonical solutions of the two model systems near z = 1.

    kind "model0": f10 = (e^{s/2(1/z-1)} z^ell, d u I0(z)), f20 = (0, 1);
    kind "modelinf": f1inf = (z^ell, 0), f2inf = (d u z^ell Iinf(z), e^{s/2(z-1)}).
    The integrals run from the singular point along the decaying ray of
    azimuth arg(s) - pi (its reciprocal for infinity), then along the unit
    circle to 1, then straight to z.
    """

    def __init__(self, kind, ell, s, u, tol=1e-13):
        if kind not in ("model0", "modelinf"):
            raise ValueError("kind must be model0 or modelinf")
        self.kind, self.ell, self.s, self.u, self.tol = kind, int(ell), complex(s), complex(u), tol
        self.d = d_ell(self.ell, self.s)
        self.phi = np.angle(self.s) - np.pi
        self._base = self._integral_to_one()

    def integrand(self, zeta):
        ell, s = self.ell, self.s
        if self.kind == "model0":
            return zeta ** (ell - 1) * np.exp(s / 2 * (1 / zeta - 1))
        return zeta ** (-(ell + 1)) * np.exp(s / 2 * (zeta - 1))

    def _integral_to_one(self):
        g = self.integrand
        tol = self.tol
        if self.kind == "model0":
            e = np.exp(1j * self.phi)
            r0 = _truncation_radius(lambda r: abs(g(r * e)), 1e-6, 1.0)
            ray = _cquad(lambda r: g(r * e) * e, r0, 1.0, tol)
            arc = _cquad(lambda t: g(np.exp(1j * t)) * 1j * np.exp(1j * t), self.phi, 0.0, tol)
            return ray + arc
        e = np.exp(-1j * self.phi)
        R = 1.0
        while abs(g(R * e)) >= 1e-18 and R < 1e8:
            R *= 2
        # from infinity inward: minus the outward integral
        ray = -_cquad(lambda r: g(r * e) * e, 1.0, R, tol)
        arc = _cquad(lambda t: g(np.exp(1j * t)) * 1j * np.exp(1j * t), -self.phi, 0.0, tol)
        return ray + arc

    def integral(self, z):
        z = complex(z)
        d = z - 1
        return self._base + _cquad(lambda t: self.integrand(1 + t * d) * d, 0.0, 1.0, self.tol)

    def f_main(self, z):
        """f10 for model0, f2inf for modelinf."""
        z = complex(z)
        ell, s = self.ell, self.s
        if self.kind == "model0":
            return np.array([np.exp(s / 2 * (1 / z - 1)) * z ** ell, self.d * self.u * self.integral(z)])
        return np.array([self.d * self.u * z ** ell * self.integral(z), np.exp(s / 2 * (z - 1))])

    def f_simple(self, z):
        """f20 for model0, f1inf for modelinf."""
        if self.kind == "model0":
            return np.array([0j, 1 + 0j])
        return np.array([complex(z) ** self.ell, 0j])

    def system(self):
        return LinearSystemSpec(self.kind, (("ell", self.ell), ("s", self.s), ("u", self.u)))


def _cauchy_derivative(f, z, rho=0.05, n=16):
    w = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([f(z + rho * x) for x in w])
    return (vals * (1 / w)[:, None]).mean(axis=0) / rho


def model_solution_residual(kind, ell, s, u, z_samples, tol=1e-13):
    """Residual of the model system for the explicit solutions at the samples.

    Derivatives of the quadrature-defined component come from a Cauchy
    integral of the quadrature values, independently of the integrand.
    Returns (max residual of the main solution, max residual of the simple one).
    """
    m = ModelSolution(kind, ell, s, u, tol)
    A = m.system().coefficient
    worst_main = worst_simple = 0.0
    for z in np.atleast_1d(z_samples):
        Y = m.f_main(z)
        dY = _cauchy_derivative(m.f_main, z)
        Az = A(z)
        scale = np.linalg.norm(dY) + np.linalg.norm(Az, 2) * np.linalg.norm(Y)
        worst_main = max(worst_main, np.linalg.norm(dY - Az @ Y) / scale)
        Ys = m.f_simple(z)
        dYs = np.array([0j, 0j]) if kind == "model0" else np.array([ell * complex(z) ** (ell - 1), 0j])
        worst_simple = max(worst_simple, np.linalg.norm(dYs - Az @ Ys))
    return worst_main, worst_simple


def model_monodromy(kind, ell, s, u, tol=1e-12):
    """Monodromy of the model system in the explicit basis (f_main, f_simple) at z = 1."""
    m = ModelSolution(kind, ell, s, u)
    F = np.column_stack([m.f_main(1.0), m.f_simple(1.0)]) if kind == "model0" else \
        np.column_stack([m.f_simple(1.0), m.f_main(1.0)])
    T = monodromy_matrix(m.system(), 1.0, tol).M
    return np.linalg.solve(F, T @ F)
