"""Adaptive Dormand-Prince 5(4) integration for real or complex array states.

The independent variable is a real path parameter.  States may be arrays of
any shape; a batch of independent problems shares one step sequence, with the
error norm taken as the worst component.
"""

from dataclasses import dataclass, field

import numpy as np

C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
# difference between 5th and embedded 4th order weights
E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

# Shampine's continuous extension: y(t + x h) = y + h * sum_i K_i * (P_i . [x, x^2, x^3, x^4])
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class StepUnderflow(RuntimeError):
    """The controller asked for a step below the allowed minimum."""

    def __init__(self, t_last, h, msg=None):
        self.t_last = t_last
        self.h = h
        super().__init__(msg or f"step size {h:.3g} underflow at t = {t_last!r}")


class NonFiniteState(RuntimeError):
    def __init__(self, t_last):
        self.t_last = t_last
        super().__init__(f"non-finite state after t = {t_last!r}")


@dataclass
class Solution:
    ts: np.ndarray
    ys: np.ndarray
    errs: np.ndarray
    n_rejected: int = 0
    n_fev: int = 0
    _dense: list = field(default_factory=list, repr=False)

    @property
    def y_end(self):
        return self.ys[-1]

    @property
    def t_end(self):
        return self.ts[-1]

    def __call__(self, t):
        """Dense-output evaluation at scalar or array t inside the integrated range."""
        if not self._dense:
            raise ValueError("integration was run without dense output")
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        direction = np.sign(self.ts[-1] - self.ts[0]) or 1.0
        key = direction * self.ts
        idx = np.searchsorted(key, direction * t, side="right") - 1
        idx = np.clip(idx, 0, len(self._dense) - 1)
        out = []
        for ti, i in zip(t, idx):
            t0, h, y0, K = self._dense[i]
            x = (ti - t0) / h
            q = P @ np.array([x, x * x, x ** 3, x ** 4])
            out.append(y0 + h * np.tensordot(q, K, axes=(0, 0)))
        out = np.array(out)
        return out[0] if scalar else out


def _norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def dopri5(f, t0, t1, y0, rtol=1e-10, atol=1e-12, h0=None, h_min=0.0,
           max_steps=1_000_000, dense=False, record=True):
    """Integrate y' = f(t, y) from t0 to t1.

    Parameters
    ----------
    f : callable(t, y) -> array like y
    rtol, atol : float
        Mixed error tolerance per component.
    h_min : float
        Absolute lower bound on |h|; crossing it raises ``StepUnderflow``
        carrying the last accepted t.
    dense : bool
        Keep stage data for continuous evaluation via ``Solution.__call__``.
    record : bool
        Keep every accepted step (otherwise only the endpoints).
    """
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float))
    span = t1 - t0
    if span == 0:
        return Solution(np.array([t0]), y[None], np.zeros(1))
    direction = 1.0 if span > 0 else -1.0
    k1 = np.asarray(f(t0, y))
    if np.iscomplexobj(k1) and not np.iscomplexobj(y):
        y = y.astype(complex)
    nfev = 1
    if h0 is None:
        d0 = float(np.max(np.abs(y))) if y.size else 0.0
        d1 = float(np.max(np.abs(k1))) if k1.size else 0.0
        h = 0.01 * max(d0, 1e-5) / d1 if d1 > 1e-12 else 1e-3 * abs(span)
        h = min(h, abs(span), 0.1 * abs(span) + 1e-3)
    else:
        h = abs(h0)
    ts, ys, errs = [t0], [y.copy()], [0.0]
    dense_data = []
    t = t0
    rejected = 0
    steps = 0
    K = [None] * 7
    while direction * (t1 - t) > 0:
        if steps >= max_steps:
            raise RuntimeError(f"too many steps ({max_steps}) at t = {t!r}")
        hs = min(h, abs(t1 - t))
        if hs < h_min and abs(t1 - t) > h_min:
            raise StepUnderflow(t, hs)
        hd = direction * hs
        K[0] = k1
        for i in range(1, 7):
            dy = sum(a * K[j] for j, a in enumerate(A[i]) if a)
            K[i] = np.asarray(f(t + C[i] * hd, y + hd * dy))
        nfev += 6
        y_new = y + hd * sum(b * K[j] for j, b in enumerate(B5) if b)
        err_vec = hd * sum(e * K[j] for j, e in enumerate(E) if e)
        if not np.all(np.isfinite(y_new)):
            rejected += 1
            h = hs * 0.2
            if h < max(h_min, 1e-15 * max(1.0, abs(t))):
                raise NonFiniteState(t)
            continue
        en = _norm(err_vec, y, y_new, rtol, atol)
        if en <= 1.0:
            if dense:
                dense_data.append((t, hd, y.copy(), np.array(K)))
            t_new = t1 if hs == abs(t1 - t) else t + hd
            t = t_new
            y = y_new
            k1 = K[6]
            steps += 1
            if record or direction * (t1 - t) <= 0:
                ts.append(t)
                ys.append(y.copy())
                errs.append(float(np.max(np.abs(err_vec))))
            elif errs:
                errs[-1] += float(np.max(np.abs(err_vec)))
            fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
            h = hs * fac
        else:
            rejected += 1
            h = hs * max(0.2, 0.9 * en ** -0.2)
            if h < h_min or h < 1e-15 * max(1.0, abs(t)):
                raise StepUnderflow(t, h)
    return Solution(np.array(ts), np.array(ys), np.array(errs), rejected, nfev, dense_data)
