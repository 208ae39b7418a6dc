"""Rotation numbers of the torus flow dtheta/dtau = a cos(theta) + ell + s cos(tau).

One period of the flow is a Moebius transformation of the circle (it is the
projectivisation of a 2x2 linear system), so its lift is

    F(theta) = theta + C + Arg(1 + q e^{-i theta}) - Arg(1 + p e^{i theta})

with q, p read off the linear monodromy and the real constant C fixed by
integrating the angle equation directly from a few starting phases.  Orbits
of F are then iterated cheaply and exactly, and the rotation number is
bracketed from the monotonicity of the lift.
"""

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .odeint import dopri5

TWO_PI = 2 * np.pi
N_THETA = 8


@dataclass(frozen=True)
class TorusParams:
    B: float
    A: float
    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def ell(self):
        return self.B / self.omega

    @property
    def a(self):
        return 1 / self.omega

    @property
    def s(self):
        return self.A / self.omega


@dataclass
class RotationEstimate:
    rho: float
    bound: float
    n_periods: int
    locked: bool = False
    lower: float = None
    upper: float = None


def _theta_rhs(ell, a, s):
    def f(tau, th):
        return a * np.cos(th) + ell + s * np.cos(tau)
    return f


def poincare_map(params, theta0, tol=1e-10):
    """Lift of theta after one period, for scalar or array theta0."""
    th = np.atleast_1d(np.asarray(theta0, dtype=float))
    sol = dopri5(_theta_rhs(params.ell, params.a, params.s), 0.0, TWO_PI, th,
                 rtol=tol, atol=tol, record=False)
    out = sol.y_end
    return out[0] if np.ndim(theta0) == 0 else out


def _period_data(ell, a, s, thetas, tol):
    """Batched one-period data for cells with parameter arrays ell, a, s (shape (n,)).

    Returns (q, p, lifts, local_error) where lifts has shape (n, len(thetas)).
    """
    ell, a, s = (np.asarray(x, dtype=float) for x in (ell, a, s))
    n = ell.size
    # linear system along z = e^{i tau}: Y' = (diag(-s/2,0)/z^2 + [[-ell,-a/2],[a/2,0]]/z + diag(0,s/2)) Y
    K = np.zeros((n, 2, 2), dtype=complex)
    R = np.zeros((n, 2, 2), dtype=complex)
    N = np.zeros((n, 2, 2), dtype=complex)
    K[:, 0, 0] = -s / 2
    R[:, 0, 0] = -ell
    R[:, 0, 1] = -a / 2
    R[:, 1, 0] = a / 2
    N[:, 1, 1] = s / 2

    def lin(tau, Y):
        z = np.exp(1j * tau)
        A = K / (z * z) + R / z + N
        return 1j * z * (A @ Y)

    Y0 = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    M = dopri5(lin, 0.0, TWO_PI, Y0, rtol=tol, atol=tol, record=False).y_end
    q = M[:, 1, 0] / M[:, 1, 1]
    p = M[:, 0, 1] / M[:, 0, 0]

    th0 = np.broadcast_to(np.asarray(thetas, dtype=float), (n, len(thetas))).copy()
    ell_c, a_c, s_c = ell[:, None], a[:, None], s[:, None]

    def ang(tau, th):
        return a_c * np.cos(th) + ell_c + s_c * np.cos(tau)

    sol = dopri5(ang, 0.0, TWO_PI, th0, rtol=tol, atol=tol, record=False)
    return q, p, sol.y_end, float(np.sum(sol.errs))


def _moebius_part(theta, q, p):
    return np.angle(1 + q * np.exp(-1j * theta)) - np.angle(1 + p * np.exp(1j * theta))


class CircleMap:
    """Exact lift of the one-period map for a batch of parameter cells."""

    def __init__(self, ell, a, s, tol=1e-10, thetas=None):
        self.thetas = TWO_PI * np.arange(N_THETA) / N_THETA if thetas is None else np.asarray(thetas)
        q, p, lifts, err = _period_data(ell, a, s, self.thetas, tol)
        if np.any(np.abs(q) >= 1) or np.any(np.abs(p) >= 1):
            raise RuntimeError("period map does not preserve the unit disk")
        self.q = q[:, None]
        self.p = p[:, None]
        Cs = lifts - self.thetas - _moebius_part(self.thetas, self.q, self.p)
        self.C = Cs.mean(axis=1, keepdims=True)
        # disagreement between the two routes plus the integrator's own estimate
        self.defect = np.max(np.abs(Cs - self.C), axis=1) + err
        self.direct = lifts

    def __call__(self, theta):
        return theta + self.C + _moebius_part(theta, self.q, self.p)

    def iterate(self, theta, n):
        x = np.array(theta, dtype=float)
        for _ in range(n):
            x = self(x)
        return x


def _estimates(cmap, n_periods):
    th = cmap.thetas
    n = n_periods
    FN = cmap.iterate(np.broadcast_to(th, cmap.C.shape[:1] + th.shape).copy(), n)
    th_next = np.append(th[1:], th[0] + TWO_PI)
    FN_next = np.concatenate([FN[:, 1:], FN[:, :1] + TWO_PI], axis=1)
    lower = np.min(FN - th_next, axis=1) / (TWO_PI * n)
    upper = np.max(FN_next - th, axis=1) / (TWO_PI * n)
    integ = cmap.defect / TWO_PI
    mid = 0.5 * (lower + upper)
    r = np.round(mid)
    g = FN - th - TWO_PI * n * r[:, None]
    locked = (g.min(axis=1) <= 0) & (g.max(axis=1) >= 0)
    rho = np.where(locked, r, mid)
    bound = np.where(locked, integ, 0.5 * (upper - lower) + integ)
    return rho, bound, locked, lower - integ, upper + integ


def rotation_number(params, n_periods=200, tol=1e-10):
    """Certified bracket for the rotation number of one parameter set."""
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    cmap = CircleMap([params.ell], [params.a], [params.s], tol)
    rho, bound, locked, lo, hi = _estimates(cmap, n_periods)
    return RotationEstimate(float(rho[0]), float(bound[0]), n_periods, bool(locked[0]),
                            float(lo[0]), float(hi[0]))


def rotation_numbers(B, A, omega=1.0, n_periods=200, tol=1e-10):
    """Vectorised rotation numbers for arrays B, A of equal shape."""
    B = np.asarray(B, dtype=float)
    A = np.asarray(A, dtype=float)
    shape = B.shape
    cmap = CircleMap(B.ravel() / omega, np.full(B.size, 1 / omega), A.ravel() / omega, tol)
    rho, bound, locked, _, _ = _estimates(cmap, n_periods)
    return rho.reshape(shape), bound.reshape(shape), locked.reshape(shape)


def rational_lock(params, p, q, n_samples=64, tol=1e-10):
    """True when the one-period map has an orbit of rotation number p/q."""
    cmap = CircleMap([params.ell], [params.a], [params.s], tol)
    th = TWO_PI * np.arange(n_samples) / n_samples
    g = cmap.iterate(th[None, :], q) - th - TWO_PI * p
    return bool(g.min() <= 0 <= g.max())


def parse_range(text):
    """'lo:hi:step' -> inclusive grid."""
    lo, hi, step = (float(x) for x in text.split(":"))
    if step <= 0 or hi < lo:
        raise ValueError(f"bad range {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _scan_row(args):
    Bs, A, omega, n_periods, tol = args
    return rotation_numbers(Bs, np.full_like(Bs, A), omega, n_periods, tol)


def scan(B_values, A_values, omega=1.0, n_periods=200, tol=1e-10, workers=1):
    """Rotation numbers on the grid; returns list of (B, A, rho, bound, locked) in grid order.

    Each A-row is one batch (the batch shares a step sequence), so the output
    depends on the grid alone and not on the number of workers.
    """
    B_values = np.asarray(B_values, dtype=float)
    A_values = np.asarray(A_values, dtype=float)
    tasks = [(B_values, A, omega, n_periods, tol) for A in A_values]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_row, tasks))
    else:
        results = [_scan_row(t) for t in tasks]
    rows = []
    for A, (rho, bound, locked) in zip(A_values, results):
        for j, B in enumerate(B_values):
            rows.append((float(B), float(A), float(rho[j]), float(bound[j]), bool(locked[j])))
    return rows


def plateau_flag(rho, bound):
    return abs(rho - round(rho)) < bound


def scan_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["B", "A", "rho", "bound", "locked"])
    for B, A, rho, bound, locked in rows:
        w.writerow([repr(B + 0.0), repr(A + 0.0), repr(rho + 0.0), repr(bound), int(locked)])
    return buf.getvalue()


def growth_point(r, omega=1.0, tol=1e-4, n_periods=200):
    """Left end (in |B|) of {rho = r} on the axis A = 0, by bisection."""
    if r == 0 or int(r) != r:
        raise ValueError("r must be a nonzero integer")
    sgn = 1 if r > 0 else -1
    r_abs = abs(r)

    def below(b):
        est = rotation_number(TorusParams(sgn * b, 0.0, omega), n_periods)
        return sgn * est.rho < r_abs

    lo, hi = 1.0, r_abs * omega + 2.0
    if not below(lo) or below(hi):
        raise RuntimeError("bisection bracket does not straddle the boundary")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    return sgn * 0.5 * (lo + hi)


def growth_point_formula(r, omega=1.0):
    return np.sign(r) * np.sqrt(r * r * omega * omega + 1)


def riccati_consistency(params, tol=1e-11, theta0=0.3, periods=1.0):
    """Max |Phi - e^{i theta}| when the angle equation and its Riccati form
    are integrated side by side along z = e^{i tau}."""
    ell, a, s = params.ell, params.a, params.s

    def f(tau, y):
        th, phi = y[0].real, y[1]
        z = np.exp(1j * tau)
        dth = a * np.cos(th) + ell + s * np.cos(tau)
        dphi_dz = ((ell * z + s / 2 * (z * z + 1)) * phi + a / 2 * z * (phi * phi + 1)) / (z * z)
        return np.array([dth, 1j * z * dphi_dz])

    y0 = np.array([theta0, np.exp(1j * theta0)], dtype=complex)
    sol = dopri5(f, 0.0, TWO_PI * periods, y0, rtol=tol, atol=tol)
    th = sol.ys[:, 0].real
    phi = sol.ys[:, 1]
    if not np.all(np.isfinite(phi)) or np.max(np.abs(phi)) > 1e8:
        raise RuntimeError("Riccati solution has a pole in the window")
    return float(np.max(np.abs(phi - np.exp(1j * th))))


def default_workers():
    env = os.environ.get("HEUNLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
