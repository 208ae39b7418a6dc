"""The isomonodromic P3 vector field on (chi, a, s): exact tangency to the
surfaces, numerical flows, and Painleve III / Hamiltonian cross-checks."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .odeint import NonFiniteState, StepUnderflow, dopri5
from .ratpoly import MPoly, NotDivisible, as_rational, div_exact
from .spectral import CAS, InternalInconsistency, SurfaceSpec, build_P


class FlowError(RuntimeError):
    """Integration stopped early; ``s_last`` is the last reliable point on the path."""

    def __init__(self, s_last, msg):
        self.s_last = s_last
        super().__init__(f"{msg} (last reliable s = {s_last})")


class PoleInWindow(ValueError):
    pass


@dataclass(frozen=True)
class FlowState:
    chi: complex
    a: complex
    s: complex
    ell: complex

    def __post_init__(self):
        if complex(self.s) == 0:
            raise ValueError("s must be nonzero")


def v_field(ell, chi, a, s):
    """Components (v_chi, v_a, v_s) of the P3 field; exact for rational input."""
    half = Fraction(1, 2) if _exact(ell, chi, a) else 0.5
    v_chi = half * (a * (1 - 4 * chi * chi) + 2 * ell * chi)
    v_a = 2 * chi * (a * a - s * s) - ell * a
    return v_chi, v_a, s


def _exact(*xs):
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def field_polynomials(ell):
    ell = as_rational(ell)
    chi, a, s = MPoly.gens(CAS)
    v_chi = (a * (1 - chi * chi * 4) + chi * (2 * ell)) * Fraction(1, 2)
    v_a = chi * (a * a - s * s) * 2 - a * ell
    return v_chi, v_a, s


def lie_derivative(P, ell):
    """v_chi dP/dchi + v_a dP/da + v_s dP/ds with ell a rational constant."""
    if P.vars != CAS:
        raise ValueError(f"expected a polynomial over {CAS}")
    v_chi, v_a, v_s = field_polynomials(ell)
    return v_chi * P.diff("chi") + v_a * P.diff("a") + v_s * P.diff("s")


def multiplier(spec):
    """The polynomial h with L_v P = h P on the surface of ``spec``."""
    P = build_P(spec.ell, spec.sign)
    L = lie_derivative(P, spec.ell)
    try:
        h = div_exact(L, P)
    except NotDivisible as exc:
        raise InternalInconsistency(f"field not tangent to S_{spec.ell},{spec.sign}: {exc}") from None
    if h * P != L:
        raise InternalInconsistency("re-multiplication check failed")
    return h


# numerical flow

def isomonodromic_rhs(ell, chi, a, s):
    """(dchi/ds, da/ds) for the flow whose w = a/(2 s chi) solves P3 with +ell."""
    return (a - 2 * chi * (2 * chi * a - ell)) / (2 * s), -2 * s * chi + a / s * (2 * chi * a - ell)


@dataclass
class Trajectory:
    ell: complex
    s: np.ndarray
    chi: np.ndarray
    a: np.ndarray
    errs: np.ndarray
    variant: str = "prime"
    spec: SurfaceSpec = None
    _segments: list = field(default_factory=list, repr=False)

    @property
    def end(self):
        return FlowState(self.chi[-1], self.a[-1], self.s[-1], self.ell)

    def states(self):
        return [FlowState(c, a, s, self.ell) for c, a, s in zip(self.chi, self.a, self.s)]

    def at(self, s_values):
        """Dense-output (chi, a) at points s lying on the integrated path."""
        s_values = np.atleast_1d(np.asarray(s_values, dtype=complex))
        out = np.empty((len(s_values), 2), dtype=complex)
        for k, sv in enumerate(s_values):
            for seg in self._segments:
                tau = seg["tau_of_s"](sv)
                if tau is not None:
                    out[k] = seg["sol"](tau)
                    break
            else:
                raise ValueError(f"s = {sv} is not on the trajectory path")
        return out[:, 0], out[:, 1]

    def membership(self, spec=None):
        spec = spec or self.spec
        P = build_P(spec.ell, spec.sign)
        res = []
        for c, a, s in zip(self.chi, self.a, self.s):
            scale = P.magnitude_sum((c, a, s))
            res.append(abs(P.eval((c, a, s))) / scale if scale else 0.0)
        return np.array(res)


def _radial_segment(s0, s1):
    L = np.log(s1 / s0)

    def s_of(t):
        return s0 * np.exp(t * L)

    def ds(t, s):
        return L * s

    def tau_of_s(sv):
        if L == 0:
            return None
        t = np.log(sv / s0) / L
        if abs(t.imag) > 1e-9 or t.real < -1e-12 or t.real > 1 + 1e-12:
            return None
        return min(max(t.real, 0.0), 1.0)

    return s_of, ds, tau_of_s, abs(L)


def _linear_segment(s0, s1):
    d = s1 - s0

    def s_of(t):
        return s0 + t * d

    def ds(t, s):
        return d

    def tau_of_s(sv):
        t = (sv - s0) / d
        if abs(t.imag) > 1e-9 or t.real < -1e-12 or t.real > 1 + 1e-12:
            return None
        return min(max(t.real, 0.0), 1.0)

    return s_of, ds, tau_of_s, abs(d) / max(min(abs(s0), abs(s1)), 1e-300)


def flow(start, s_end, path="radial", tol=1e-10, variant="prime", spec=None):
    """Integrate the isomonodromic system from ``start`` to ``s_end``.

    ``path`` is "radial" (s = s0 exp(t log(s_end/s0)), t in [0, 1]) or a
    sequence of intermediate vertices for a straight polyline.  ``variant``
    "prime" is the system whose w solves P3 with +ell; "plain" flips ell.
    """
    ell = complex(start.ell)
    ell_eff = ell if variant == "prime" else -ell
    s0 = complex(start.s)
    s_end = complex(s_end)
    if s_end == 0:
        raise ValueError("path must avoid s = 0")
    if isinstance(path, str):
        if path != "radial":
            raise ValueError(f"unknown path {path!r}")
        verts = [s0, s_end]
        maker = _radial_segment
    else:
        verts = [s0] + [complex(v) for v in path] + [s_end]
        maker = _linear_segment
        for p, q in zip(verts, verts[1:]):
            # distance from 0 to the segment
            d = q - p
            t = np.clip(-(np.conj(p) * d).real / (abs(d) ** 2 or 1), 0, 1)
            if abs(p + t * d) < 1e-14:
                raise ValueError("polyline passes through s = 0")
    y = np.array([start.chi, start.a], dtype=complex)
    S, X, Aa, E = [s0], [y[0]], [y[1]], [0.0]
    segments = []
    for p, q in zip(verts, verts[1:]):
        s_of, ds, tau_of_s, rate = maker(p, q)

        def rhs(t, y, s_of=s_of, ds=ds):
            s = s_of(t)
            dchi, da = isomonodromic_rhs(ell_eff, y[0], y[1], s)
            return ds(t, s) * np.array([dchi, da])

        h_min = 1e-12 / max(rate, 1e-300)
        try:
            sol = dopri5(rhs, 0.0, 1.0, y, rtol=tol, atol=tol, h_min=h_min, dense=True)
        except (StepUnderflow, NonFiniteState) as exc:
            raise FlowError(s_of(exc.t_last), f"integration failed: {exc}") from None
        segments.append({"sol": sol, "tau_of_s": tau_of_s})
        ss = s_of(sol.ts[1:])
        S.extend(ss)
        X.extend(sol.ys[1:, 0])
        Aa.extend(sol.ys[1:, 1])
        E.extend(sol.errs[1:])
        y = sol.y_end
    return Trajectory(ell, np.array(S), np.array(X), np.array(Aa), np.array(E), variant, spec, segments)


def w_of(chi, a, s):
    return a / (2 * s * chi)


def p3_rhs(ell, w, dw, s):
    return dw * dw / w - dw / s + 2 * ell * w * w / s - (2 * ell + 2) / s + w ** 3 - 1 / w


def stencil_derivatives(f, centers, h):
    """Fourth-order centred first and second derivatives of f at the centers."""
    c = np.asarray(centers)
    fm2, fm1, f0, fp1, fp2 = (f(c + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return f0, d1, d2


def p3_residual(traj, h, centers=None, n_centers=21, ell=None, pole_bound=1e6):
    """Max |w'' - RHS| / max(1, |w|^3) using stencils of step h along the path.

    The default centers cover the middle half of the trajectory's s-range and
    do not depend on h, so residuals for successive h are comparable.
    Requires a straight path (radial along a ray, or a single segment).
    Returns (max residual, centers).
    """
    ell = traj.ell if ell is None else ell
    if traj.variant != "prime":
        ell = -ell
    s_lo, s_hi = traj.s[0], traj.s[-1]
    direction = (s_hi - s_lo) / abs(s_hi - s_lo)
    if centers is None:
        quarter = (s_hi - s_lo) / 4
        centers = np.linspace(s_lo + quarter, s_hi - quarter, n_centers)
    else:
        centers = np.asarray(centers, dtype=complex)
    h = h * direction

    def w(sv):
        chi, a = traj.at(sv)
        if np.any(np.abs(chi) < 1 / pole_bound):
            raise PoleInWindow("chi vanishes in the window (w has a pole)")
        vals = w_of(chi, a, np.asarray(sv))
        if np.any(np.abs(vals) > pole_bound) or np.any(np.abs(vals) < 1 / pole_bound):
            raise PoleInWindow("w has a pole or zero in the window")
        return vals

    w0, d1, d2 = stencil_derivatives(w, centers, h)
    res = np.abs(d2 - p3_rhs(ell, w0, d1, centers)) / np.maximum(1.0, np.abs(w0) ** 3)
    return float(np.max(res)), centers


def p3_residual_from_samples(ell, s, w, h):
    """Residual for caller-supplied samples on a uniform grid with spacing h."""
    w = np.asarray(w)
    s = np.asarray(s)
    d1 = (w[:-4] - 8 * w[1:-3] + 8 * w[3:-1] - w[4:]) / (12 * h)
    d2 = (-w[:-4] + 16 * w[1:-3] - 30 * w[2:-2] + 16 * w[3:-1] - w[4:]) / (12 * h * h)
    w0 = w[2:-2]
    return float(np.max(np.abs(d2 - p3_rhs(ell, w0, d1, s[2:-2])) / np.maximum(1.0, np.abs(w0) ** 3)))


def hamiltonian(ell, chi, a, s):
    return -chi * chi * a * a / s + a * a / (4 * s) + s * chi * chi - ell * chi * a / s


def hamiltonian_gradient(ell, chi, a, s):
    dH_da = -2 * chi * chi * a / s + a / (2 * s) - ell * chi / s
    dH_dchi = -2 * chi * a * a / s + 2 * s * chi - ell * a / s
    return dH_dchi, dH_da


CONVENTIONS = [(p, q) for p in (1, -1) for q in (1, -1)]


def hamiltonian_convention(traj):
    """Which of chi' = p dH/da, a' = -p dH/dchi with ell -> q*ell fits the trajectory.

    Derivatives along the trajectory are the integrated field values at the
    stored nodes.  Returns ((p, q), max deviation, {convention: deviation}).
    """
    ell_eff = traj.ell if traj.variant == "prime" else -traj.ell
    dchi, da = isomonodromic_rhs(ell_eff, traj.chi, traj.a, traj.s)
    scale = np.maximum(1.0, np.abs(dchi) + np.abs(da))
    devs = {}
    for p, q in CONVENTIONS:
        Hc, Ha = hamiltonian_gradient(q * traj.ell, traj.chi, traj.a, traj.s)
        dev = (np.abs(dchi - p * Ha) + np.abs(da + p * Hc)) / scale
        devs[(p, q)] = float(np.max(dev))
    best = min(devs, key=devs.get)
    return best, devs[best], devs


def _scalar_flow(rhs, y0, s0, s_end, tol, what):
    s0, s_end = complex(s0), complex(s_end)
    s_of, ds, _, rate = _radial_segment(s0, s_end)

    def f(t, y):
        s = s_of(t)
        return ds(t, s) * rhs(y, s)

    try:
        sol = dopri5(f, 0.0, 1.0, np.array(y0, dtype=complex), rtol=tol, atol=tol,
                     h_min=1e-12 / max(rate, 1e-300), dense=True)
    except (StepUnderflow, NonFiniteState) as exc:
        raise FlowError(s_of(exc.t_last), f"{what} blew up") from None
    return s_of(sol.ts), sol.ys


def riccati_l1(chi0, s0, s_end, tol=1e-10):
    """chi'(s) = (1 - 4 chi^2)/2 - chi/s; returns (s, chi, lifted a) on S_1,-."""
    def rhs(y, s):
        c = y[0]
        return np.array([(1 - 4 * c * c) / 2 - c / s])

    s, ys = _scalar_flow(rhs, [chi0], s0, s_end, tol, "chi")
    chi = ys[:, 0]
    return s, chi, lift_l1(chi, s)


def lift_l1(chi, s):
    return s - 4 * chi / (1 - 4 * chi * chi)


def riccati_l0(a0, s0, s_end, plane=0.5, tol=1e-10):
    """a'(s) = +-(a^2 - s^2)/s on the invariant plane chi = +-1/2."""
    if plane not in (0.5, -0.5):
        raise ValueError("plane must be +1/2 or -1/2")
    sg = 1 if plane > 0 else -1

    def rhs(y, s):
        return np.array([sg * (y[0] ** 2 - s * s) / s])

    s, ys = _scalar_flow(rhs, [a0], s0, s_end, tol, "a")
    return s, ys[:, 0]
