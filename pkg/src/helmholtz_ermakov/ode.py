"""Adaptive Dormand-Prince 5(4) integration with dense output.

Every solver in the package (oscillator, Milne-Pinney, shooting) runs on
this one engine so that step sequences and error control are identical
across modules.

The step controller uses the mixed max-norm

    err = max_i |e_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|))

with safety factor 0.9 and the step ratio clamped to [0.2, 5].  Dense
output is the free fourth-order continuous extension of the pair.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import IntegrationError

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights (7 stages, FSAL)
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension: y(t + s*h) = y + h * K.T @ (_P @ [s, s^2, s^3, s^4])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

ORDER = 5
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegrationSettings:
    """Tolerances and limits for :func:`integrate`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 10_000_000
    initial_step: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError("initial_step must be positive")


DEFAULT_SETTINGS = IntegrationSettings()


class DenseTrajectory:
    """Accepted steps of an integration plus their interpolation data.

    Parameters
    ----------
    ts : ndarray, shape (n + 1,)
        Step abscissae, strictly monotone in the direction of integration.
    ys : ndarray, shape (n + 1, d)
        States at the step abscissae.
    coeffs : ndarray, shape (n, d, 4)
        Per-step interpolation coefficients.
    """

    def __init__(self, ts, ys, coeffs):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.direction = 1.0 if self.ts[-1] > self.ts[0] else -1.0
        self._keys = self.direction * self.ts
        for arr in (self.ts, self.ys, self.coeffs):
            arr.setflags(write=False)

    @property
    def t0(self):
        return float(self.ts[0])

    @property
    def t1(self):
        return float(self.ts[-1])

    @property
    def dim(self):
        return self.ys.shape[1]

    @property
    def n_steps(self):
        return len(self.ts) - 1

    def span_contains(self, t, slack=0.0):
        lo, hi = sorted((self.t0, self.t1))
        pad = slack + 8 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
        t = np.asarray(t)
        return bool(np.all((t >= lo - pad) & (t <= hi + pad)))

    def _locate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.span_contains(t):
            raise ValueError(f"query outside integrated span [{self.t0}, {self.t1}]")
        idx = np.searchsorted(self._keys, self.direction * t, side="right") - 1
        idx = np.clip(idx, 0, self.n_steps - 1)
        h = self.ts[idx + 1] - self.ts[idx]
        s = (t - self.ts[idx]) / h
        return t, idx, h, s

    def __call__(self, t):
        """State vector(s) at ``t``; shape (d,) for scalar t, (len(t), d) otherwise."""
        scalar = np.ndim(t) == 0
        t, idx, h, s = self._locate(t)
        powers = np.stack([s, s**2, s**3, s**4], axis=-1)
        out = self.ys[idx] + h[:, None] * np.einsum("ndk,nk->nd", self.coeffs[idx], powers)
        # step endpoints reproduce stored states exactly
        hit = np.searchsorted(self._keys, self.direction * t)
        hit = np.clip(hit, 0, self.n_steps)
        exact = self.ts[hit] == t
        out[exact] = self.ys[hit[exact]]
        return out[0] if scalar else out

    def derivative(self, t):
        """Time derivative of the interpolant."""
        scalar = np.ndim(t) == 0
        t, idx, h, s = self._locate(t)
        powers = np.stack([np.ones_like(s), 2 * s, 3 * s**2, 4 * s**3], axis=-1)
        out = np.einsum("ndk,nk->nd", self.coeffs[idx], powers)
        return out[0] if scalar else out

    def sample(self, n):
        """Uniform grid of ``n`` points over the span and the states on it."""
        grid = np.linspace(self.t0, self.t1, n)
        return grid, self(grid)


def _initial_step(rhs, t0, y0, f0, direction, settings, span):
    # Hairer, Norsett & Wanner, "Solving ODEs I", sec. II.4
    scale = settings.abs_tol + settings.rel_tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = rhs(t0 + direction * h0, y1)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1, span)


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t0: float,
    t1: float,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
) -> DenseTrajectory:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` (either direction).

    Raises
    ------
    IntegrationError
        When the step budget is exhausted, the step size underflows, or the
        right-hand side produces non-finite values.
    """
    y = np.array(y0, dtype=float)
    if y.ndim != 1:
        raise ValueError("y0 must be a 1-D vector")
    t0 = float(t0)
    t1 = float(t1)
    if t0 == t1:
        raise ValueError("t0 and t1 must differ")
    if not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite initial state", t0)

    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    rtol, atol = settings.rel_tol, settings.abs_tol
    d = y.size

    t = t0
    f = np.asarray(rhs(t, y), dtype=float)
    if settings.initial_step is not None:
        h_abs = min(settings.initial_step, span)
    else:
        h_abs = _initial_step(rhs, t0, y, f, direction, settings, span)

    ts = [t]
    ys = [y]
    coeffs = []
    K = np.empty((7, d))
    eps = np.finfo(float).eps

    for _ in range(settings.max_steps):
        min_step = 10 * eps * max(abs(t), 1.0)
        rejected = False
        while True:
            if h_abs < min_step:
                raise IntegrationError("step size underflow", t)
            h = direction * h_abs
            t_new = t + h
            if direction * (t_new - t1) > 0 or abs(t1 - t_new) < min_step:
                t_new = t1
                h = t_new - t
                h_abs = abs(h)
            K[0] = f
            # trial stages may overflow near a singularity; such steps are rejected below
            with np.errstate(over="ignore", invalid="ignore"):
                for s in range(1, 6):
                    K[s] = rhs(t + _C[s] * h, y + h * (_A[s] @ K[:s]))
                y_new = y + h * (_B @ K[:6])
                f_new = np.asarray(rhs(t_new, y_new), dtype=float)
            K[6] = f_new
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new))):
                err = np.inf
            else:
                scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
                err = np.max(np.abs(h * (_E @ K)) / scale)
            if err <= 1.0:
                factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** (-1 / ORDER))
                if rejected:
                    factor = min(1.0, factor)
                break
            if np.isfinite(err):
                h_abs *= max(MIN_FACTOR, SAFETY * err ** (-1 / ORDER))
            else:
                h_abs *= MIN_FACTOR
            rejected = True

        coeffs.append(K.T @ _P)
        t, y, f = t_new, y_new, f_new
        ts.append(t)
        ys.append(y)
        if t == t1:
            return DenseTrajectory(ts, ys, coeffs)
        h_abs *= max(MIN_FACTOR, factor)

    raise IntegrationError(f"step budget of {settings.max_steps} exhausted", t)
