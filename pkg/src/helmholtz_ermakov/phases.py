"""Classical angles and quantum phases as functionals of rho(t).

Any object exposing ``rho_derivatives(t) -> (rho, rho_dot, rho_ddot)``
(vectorized), ``breakpoints()``, ``t0`` and ``t1`` can be fed to these
functions: a numerically integrated :class:`~.ermakov.PinneyTrajectory`
or a closed-form :class:`AnalyticRho`.  For numerical trajectories
rho_ddot is taken from the Milne-Pinney equation, never differenced.

All integrals run over adaptive Gauss-Kronrod (7, 15) panels seeded with
the integration steps, so no panel straddles a kink of the interpolant.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import ClosureError, DomainError, QuadratureError

HBAR = 1.0

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 nodes, ascending
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:14:2] = _WG[2::-1]

QUAD_TOL = 1e-10


def gauss_kronrod(func, breaks, a, b, tol=QUAD_TOL, max_rounds=40, max_panels=200_000):
    """Integral of vectorized ``func`` over [a, b] with panels split at ``breaks``.

    Panels are bisected until each has |K15 - G7| below its share of ``tol``.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    inner = np.asarray(breaks, dtype=float)
    inner = inner[(inner > a) & (inner < b)]
    edges = np.unique(np.concatenate([[a], inner, [b]]))
    lo, hi = edges[:-1], edges[1:]
    width = b - a
    total = 0.0
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        t = mid[:, None] + half[:, None] * _NODES[None, :]
        vals = np.asarray(func(t.ravel()), dtype=float).reshape(t.shape)
        kron = half * (vals @ _KRONROD)
        gauss = half * (vals @ _GAUSS)
        err = np.abs(kron - gauss)
        share = tol * (hi - lo) / width
        done = (err <= share) | (err <= 64 * np.finfo(float).eps * np.abs(kron))
        total += kron[done].sum()
        if np.all(done):
            return sign * total
        lo, hi = lo[~done], hi[~done]
        if 2 * lo.size > max_panels:
            break
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise QuadratureError("panel refinement did not converge", float(lo[0]))


class AnalyticRho:
    """Closed-form rho(t) for the phase functionals.

    Parameters
    ----------
    derivatives : callable
        Vectorized ``t -> (rho, rho_dot, rho_ddot)``.
    t0, t1 : float
        Interval on which the formula is valid.
    panels : int
        Number of equal seed panels for quadrature.
    """

    def __init__(self, derivatives, t0, t1, panels=16, convention=None):
        self._derivatives = derivatives
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.panels = panels
        self.convention = convention

    def breakpoints(self):
        return np.linspace(self.t0, self.t1, self.panels + 1)

    def rho_derivatives(self, t):
        rho, rho_dot, rho_ddot = self._derivatives(np.asarray(t, dtype=float))
        if np.ndim(t) == 0:
            return float(rho), float(rho_dot), float(rho_ddot)
        return rho, rho_dot, rho_ddot


def _check_span(path, *ts):
    lo, hi = sorted((path.t0, path.t1))
    pad = 8 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
    for t in ts:
        if not (lo - pad <= t <= hi + pad):
            raise DomainError(f"t={t} outside rho span [{path.t0}, {path.t1}]")


def _integral(path, integrand, t0, t):
    _check_span(path, t0, t)

    def f(ts):
        return integrand(*path.rho_derivatives(ts))

    return gauss_kronrod(f, path.breakpoints(), t0, t)


def inverse_rho_squared_integral(path, t0, t):
    """Integral of 1/rho^2, the full advance of the angle variable."""
    return _integral(path, lambda r, rd, rdd: r**-2, t0, t)


def dynamical_angle(path, t0, t):
    """Integral of 1/rho^2 - (rho^2/2) d/dt(rho_dot/rho)."""

    def integrand(r, rd, rdd):
        return r**-2 - 0.5 * r**2 * (rdd / r - rd**2 / r**2)

    return _integral(path, integrand, t0, t)


def geometric_angle(path, t0, t):
    """One half the integral of rho rho_ddot - rho_dot^2."""
    return 0.5 * _integral(path, lambda r, rd, rdd: r * rdd - rd**2, t0, t)


@dataclass(frozen=True)
class PhaseReport:
    dynamical_angle: float
    geometric_angle: float
    total: float
    span: Tuple[float, float]


def angle_report(path, t0, t):
    d = dynamical_angle(path, t0, t)
    g = geometric_angle(path, t0, t)
    return PhaseReport(d, g, d + g, (float(t0), float(t)))


def closure_defect(path, period, t0=None):
    t0 = path.t0 if t0 is None else t0
    _check_span(path, t0, t0 + period)
    r0, rd0, _ = path.rho_derivatives(t0)
    r1, rd1, _ = path.rho_derivatives(t0 + period)
    return max(abs(r1 - r0), abs(rd1 - rd0))


def hannay_angle(path, period, t0=None, closure_tol=1e-6):
    """Minus the loop integral of rho_dot d rho over one period (never positive).

    Raises
    ------
    ClosureError
        If rho or rho_dot fails to return within ``closure_tol`` after ``period``.
    """
    if not period > 0:
        raise DomainError("period must be positive")
    t0 = path.t0 if t0 is None else t0
    defect = closure_defect(path, period, t0)
    if defect > closure_tol:
        raise ClosureError("rho trajectory is not closed over the period", defect, t0 + period)
    return -_integral(path, lambda r, rd, rdd: rd**2, t0, t0 + period)


def _level(n):
    if int(n) != n or n < 0:
        raise DomainError("quantum number must be a non-negative integer")
    return int(n) + 0.5


def lewis_phase(n, path, t0, t):
    """alpha_n(t) = -(n + 1/2) times the integral of 1/rho^2 (hbar = 1)."""
    return -_level(n) * inverse_rho_squared_integral(path, t0, t)


def quantum_geometric_phase(n, path, t0, t):
    return -_level(n) * geometric_angle(path, t0, t)


def berry_phase(n, path, period, t0=None, closure_tol=1e-6):
    """Cyclic geometric phase (n + 1/2) times the loop integral of rho_dot d rho."""
    return -_level(n) * hannay_angle(path, period, t0, closure_tol)


@dataclass(frozen=True)
class QuantumPhaseReport:
    n: int
    lewis_phase: float
    geometric_phase: float
    berry_phase: Optional[float] = None
    hbar: float = HBAR


def quantum_report(n, path, t0, t, period=None, closure_tol=1e-6):
    """Phases of level ``n`` over [t0, t]; the Berry phase only when ``period`` is given."""
    level = _level(n)
    total = inverse_rho_squared_integral(path, t0, t)
    geo = geometric_angle(path, t0, t)
    berry = None
    if period is not None:
        berry = -level * hannay_angle(path, period, t0, closure_tol)
    return QuantumPhaseReport(int(n), -level * total, -level * geo, berry)
