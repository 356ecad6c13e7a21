"""Classical Ermakov problem for the Helmholtz oscillator.

With x renamed to t, psi -> q and psi' -> p, the Helmholtz equation is the
motion of the time-dependent oscillator

    H(t) = p**2 / 2 + lambda * phi(t) * q**2 / 2,

whose exact invariant

    I = (rho * p - rho_dot * q)**2 / 2 + q**2 / (2 rho**2)

is built from any positive solution rho of the Milne-Pinney equation
rho'' + lambda phi rho = rho**-3.

Poisson brackets follow {f, g} = f_q g_p - f_p g_q, under which the
quadratic generators T1 = p^2/2, T2 = pq, T3 = q^2/2 close as
{T1, T2} = -2 T1, {T2, T3} = -2 T3, {T1, T3} = -T2.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, IntegrationError, PinneyError
from .ode import DEFAULT_SETTINGS, DenseTrajectory, integrate
from .profiles import check_domain, eval_profile, scalar_evaluator


class Convention(enum.Enum):
    """Which Milne-Pinney normalization a rho belongs to.

    STANDARD: rho'' + lambda phi rho = 1 / rho^3
    RESCALED: rho'' / lambda + phi rho = 1 / rho^3

    Solutions map exactly through rho_rescaled = lambda**0.25 * rho_standard.
    """

    STANDARD = "standard"
    RESCALED = "rescaled"


@dataclass(frozen=True)
class OscState:
    t: float
    q: float
    p: float


@dataclass(frozen=True)
class PinneyState:
    t: float
    rho: float
    rho_dot: float

    def __post_init__(self):
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise DomainError(f"rho must be positive and finite, got {self.rho!r}")


@dataclass(frozen=True)
class AlgebraCoefficients:
    """Components of the invariant on the generators: I = mu1 T1 + mu2 T2 + mu3 T3."""

    mu1: float
    mu2: float
    mu3: float

    @property
    def determinant(self):
        """mu1 * mu3 - mu2**2, identically one for a Pinney-built invariant."""
        return self.mu1 * self.mu3 - self.mu2**2

    def as_array(self):
        return np.array([self.mu1, self.mu2, self.mu3])


def generators(q, p):
    """Phase-space functions (T1, T2, T3) = (p^2/2, pq, q^2/2)."""
    return p * p / 2, p * q, q * q / 2


def _structure_constants():
    # C[r, n, m] with {T_n, T_m} = sum_r C[r, n, m] T_r (0-based indices)
    c = np.zeros((3, 3, 3))
    c[0, 0, 1], c[0, 1, 0] = -2.0, 2.0
    c[2, 1, 2], c[2, 2, 1] = -2.0, 2.0
    c[1, 0, 2], c[1, 2, 0] = -1.0, 1.0
    return c


STRUCTURE_CONSTANTS = _structure_constants()
STRUCTURE_CONSTANTS.setflags(write=False)


def hamiltonian_coefficients(lam_phi):
    """h_n(t) in H = sum_n h_n T_n for the Helmholtz Hamiltonian."""
    return np.array([1.0, 0.0, lam_phi])


def mu_rates(mu, lam_phi):
    """d mu_r / dt = - sum_{n,m} C[r,n,m] h_m mu_n.

    For the Helmholtz Hamiltonian this is mu1' = -2 mu2,
    mu2' = lam_phi mu1 - mu3, mu3' = 2 lam_phi mu2.
    """
    h = hamiltonian_coefficients(lam_phi)
    return -np.einsum("rnm,m,n->r", STRUCTURE_CONSTANTS, h, np.asarray(mu, dtype=float))


def hamiltonian_value(state, profile, lam):
    """H = p^2/2 + lambda phi(t) q^2/2 at ``state``."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    phi = eval_profile(profile, state.t)
    return state.p**2 / 2 + lam * phi * state.q**2 / 2


def algebra_coefficients(pin):
    return AlgebraCoefficients(pin.rho**2, -pin.rho * pin.rho_dot, pin.rho_dot**2 + 1 / pin.rho**2)


# ---------------------------------------------------------------------------
# Milne-Pinney equation


def pinney_acceleration(profile, lam, convention, t, rho):
    """rho'' as given by the Milne-Pinney equation of ``convention``."""
    phi = eval_profile(profile, t)
    if convention is Convention.STANDARD:
        return rho**-3 - lam * phi * rho
    return lam * (rho**-3 - phi * rho)


def pinney_residual(profile, lam, convention, t, rho, rho_ddot):
    """Left minus right side of the selected Milne-Pinney equation."""
    phi = eval_profile(profile, t)
    if convention is Convention.STANDARD:
        return rho_ddot + lam * phi * rho - rho**-3
    return rho_ddot / lam + phi * rho - rho**-3


def convert_pinney_state(pin, lam, source, target):
    """Map a Pinney state between conventions (exact rescaling by lambda**0.25)."""
    if source is target:
        return pin
    k = lam**0.25 if target is Convention.RESCALED else lam**-0.25
    return PinneyState(pin.t, k * pin.rho, k * pin.rho_dot)


def adiabatic_seed(profile, lam, t0, convention=Convention.STANDARD):
    """Default initial Pinney data: rho at the local equilibrium, rho_dot = 0.

    This is (lambda phi(t0))^(-1/4) under STANDARD and phi(t0)^(-1/4) under RESCALED,
    the leading adiabatic term.
    """
    phi = eval_profile(profile, t0)
    scale = lam if convention is Convention.STANDARD else 1.0
    return PinneyState(float(t0), (scale * phi) ** -0.25, 0.0)


class PinneyTrajectory:
    """A numerically integrated rho(t) with the profile and convention it solves.

    ``columns`` gives the positions of (rho, rho_dot) inside the state vector
    of ``dense``, so the Pinney part of a coupled integration can be viewed
    without copying.
    """

    def __init__(self, dense, profile, lam, convention, columns=(0, 1)):
        self.dense = dense
        self.profile = profile
        self.lam = lam
        self.convention = convention
        self.columns = tuple(columns)

    @property
    def t0(self):
        return self.dense.t0

    @property
    def t1(self):
        return self.dense.t1

    def breakpoints(self):
        return self.dense.ts

    def state(self, t):
        y = self.dense(t)
        i, j = self.columns
        return PinneyState(float(t), float(y[i]), float(y[j]))

    def rho_derivatives(self, t):
        """(rho, rho_dot, rho_ddot); rho_ddot comes from the Pinney equation."""
        y = np.atleast_2d(self.dense(t))
        i, j = self.columns
        rho, rho_dot = y[:, i], y[:, j]
        rho_ddot = pinney_acceleration(self.profile, self.lam, self.convention, np.atleast_1d(t), rho)
        if np.ndim(t) == 0:
            return float(rho[0]), float(rho_dot[0]), float(rho_ddot[0])
        return rho, rho_dot, rho_ddot

    def residual(self, t):
        """Pinney residual using the derivative of the rho_dot interpolant."""
        y = np.atleast_2d(self.dense(t))
        dy = np.atleast_2d(self.dense.derivative(t))
        i, j = self.columns
        return pinney_residual(
            self.profile, self.lam, self.convention, np.atleast_1d(t), y[:, i], dy[:, j]
        )


def _check_rho_positive(dense, column):
    rho = dense.ys[:, column]
    bad = np.flatnonzero(~(rho > 0))
    if bad.size:
        raise PinneyError("rho left the positive half-line", float(dense.ts[bad[0]]))


def solve_pinney(profile, lam, rho0, t1, convention=Convention.STANDARD, settings=DEFAULT_SETTINGS):
    """Integrate the Milne-Pinney equation from ``rho0`` to ``t1``.

    Raises
    ------
    PinneyError
        When rho collapses towards zero (reported with the failing t).
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    check_domain(profile, [rho0.t, t1])

    phi = scalar_evaluator(profile)
    if convention is Convention.STANDARD:

        def rhs(t, y):
            rho = y[0]
            if rho <= 0:
                return np.array([np.inf, np.inf])
            return np.array([y[1], rho**-3 - lam * phi(t) * rho])

    else:

        def rhs(t, y):
            rho = y[0]
            if rho <= 0:
                return np.array([np.inf, np.inf])
            return np.array([y[1], lam * (rho**-3 - phi(t) * rho)])

    try:
        dense = integrate(rhs, [rho0.rho, rho0.rho_dot], rho0.t, t1, settings)
    except IntegrationError as exc:
        raise PinneyError("rho underflow", exc.t) from exc
    _check_rho_positive(dense, 0)
    return PinneyTrajectory(dense, profile, lam, convention)


def pinney_from_linear(f, g, t, mix):
    """Milne-Pinney state from two independent oscillator solutions.

    ``f`` and ``g`` are trajectories of the same linear equation with state
    (q, p); ``mix = (A, B, C)`` must satisfy A C - B^2 = 1 / W^2 where
    W = f g' - f' g.  Then rho = sqrt(A f^2 + 2 B f g + C g^2).
    """
    f0, fp = np.asarray(f(t))[:2]
    g0, gp = np.asarray(g(t))[:2]
    w = f0 * gp - fp * g0
    scale = max(abs(f0 * gp), abs(fp * g0), abs(f0 * fp), abs(g0 * gp))
    if not abs(w) > 1e-12 * scale:
        raise DomainError("f and g are linearly dependent (zero Wronskian)")
    a, b, c = (float(x) for x in mix)
    if not math.isclose(a * c - b * b, 1 / w**2, rel_tol=1e-6):
        raise DomainError(f"mix violates A C - B^2 = 1/W^2 (W = {w:.6g})")
    radicand = a * f0**2 + 2 * b * f0 * g0 + c * g0**2
    if not radicand > 0:
        raise DomainError("negative radicand in rho^2")
    rho = math.sqrt(radicand)
    rho_dot = (a * f0 * fp + b * (fp * g0 + f0 * gp) + c * g0 * gp) / rho
    return PinneyState(float(t), rho, rho_dot)


def mix_from_initial(f, g, pin):
    """Mixing coefficients (A, B, C) reproducing Pinney data ``pin`` from f, g."""
    f0, fp = np.asarray(f(pin.t))[:2]
    g0, gp = np.asarray(g(pin.t))[:2]
    r = np.array([[f0, fp], [g0, gp]])
    if abs(np.linalg.det(r)) <= 1e-12 * np.max(np.abs(r)) ** 2:
        raise DomainError("f and g are linearly dependent (zero Wronskian)")
    a = pin.rho**2
    b = pin.rho * pin.rho_dot
    canonical = np.array([[a, b], [b, (1 + b * b) / a]])
    rinv = np.linalg.inv(r)
    m = rinv.T @ canonical @ rinv
    return float(m[0, 0]), float(m[0, 1]), float(m[1, 1])


# ---------------------------------------------------------------------------
# invariant and canonical transformation


def _check_same_time(osc, pin):
    if abs(osc.t - pin.t) > 1e-12 * max(1.0, abs(osc.t)):
        raise DomainError(f"oscillator at t={osc.t} but Pinney state at t={pin.t}")


def ermakov_invariant(osc, pin):
    _check_same_time(osc, pin)
    return (pin.rho * osc.p - pin.rho_dot * osc.q) ** 2 / 2 + osc.q**2 / (2 * pin.rho**2)


def _radicand(q, invariant, pin):
    if not invariant > 0:
        raise DomainError("invariant must be positive")
    top = 2 * invariant * pin.rho**2
    rad = top - q * q
    if rad < 0:
        if rad < -64 * np.finfo(float).eps * top:
            raise DomainError("q^2 exceeds 2 I rho^2")
        rad = 0.0
    return rad


def generating_function(q, invariant, pin):
    """S(q, I) with the integration constant set to zero."""
    root = math.sqrt(_radicand(q, invariant, pin))
    if root == 0:
        angle = math.copysign(math.pi / 2, q) if q != 0 else 0.0
    else:
        angle = math.atan(q / root)
    return (q * q / 2) * (pin.rho_dot / pin.rho) + invariant * angle + q * root / (2 * pin.rho**2)


def angle_variable(q, invariant, pin):
    """theta = dS/dI, in [-pi/2, pi/2]."""
    root = math.sqrt(_radicand(q, invariant, pin))
    if root == 0:
        return math.copysign(math.pi / 2, q) if q != 0 else 0.0
    return math.atan(q / root)


def canonical_qp(invariant, theta, pin):
    """(q, p) at invariant ``invariant`` and angle ``theta``."""
    if invariant < 0:
        raise DomainError("invariant must be non-negative")
    amp = math.sqrt(2 * invariant)
    q = pin.rho * amp * math.sin(theta)
    p = amp / pin.rho * (math.cos(theta) + pin.rho_dot * pin.rho * math.sin(theta))
    return q, p


def full_angle(q, p, rho, rho_dot, inv_sqrt_lam=1.0):
    """Angle on the full circle from sin ~ q/rho and cos ~ rho p - rho_dot q.

    ``inv_sqrt_lam`` rescales rho_dot for the 1/sqrt(lambda) invariant.
    Works elementwise on arrays.
    """
    return np.arctan2(q / rho, rho * p - rho_dot * q * inv_sqrt_lam)


class CoupledTrajectory:
    """Oscillator and Milne-Pinney equation integrated as one 4-vector (q, p, rho, rho_dot)."""

    def __init__(self, dense, profile, lam, convention=Convention.STANDARD):
        self.dense = dense
        self.profile = profile
        self.lam = lam
        self.convention = convention
        self.pinney = PinneyTrajectory(dense, profile, lam, convention, columns=(2, 3))

    @property
    def t0(self):
        return self.dense.t0

    @property
    def t1(self):
        return self.dense.t1

    def osc_state(self, t):
        q, p = self.dense(t)[:2]
        return OscState(float(t), float(q), float(p))

    def oscillator(self, t):
        """(q, p) at ``t``; usable as an ``f`` or ``g`` argument of pinney_from_linear."""
        return self.dense(t)[..., :2]

    def invariant(self, t):
        """Ermakov invariant along the trajectory (vectorized)."""
        q, p, rho, rho_dot = np.atleast_2d(self.dense(t)).T
        val = (rho * p - rho_dot * q) ** 2 / 2 + q**2 / (2 * rho**2)
        return float(val[0]) if np.ndim(t) == 0 else val

    def _angle(self, y):
        q, p, rho, rho_dot = y.T
        return full_angle(q, p, rho, rho_dot)

    def unwrapped_angle(self, t):
        """Continuous angle variable at ``t`` (sorted along the integration direction).

        Unwrapping runs over the union of accepted steps and the requested
        points, which keeps consecutive samples well under half a turn apart.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        nodes = np.union1d(self.dense.ts, t)
        if self.dense.direction < 0:
            nodes = nodes[::-1]
        theta = np.unwrap(self._angle(self.dense(nodes)))
        order = np.argsort(self.dense.direction * nodes)
        return np.interp(self.dense.direction * t, (self.dense.direction * nodes)[order], theta[order])


def oscillator_rhs(profile, lam):
    phi = scalar_evaluator(profile)

    def rhs(t, y):
        return np.array([y[1], -lam * phi(t) * y[0]])

    return rhs


def evolve_oscillator(profile, lam, y0, t1, settings=DEFAULT_SETTINGS):
    """Integrate q' = p, p' = -lambda phi(t) q from ``y0`` to ``t1``."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    check_domain(profile, [y0.t, t1])
    return integrate(oscillator_rhs(profile, lam), [y0.q, y0.p], y0.t, t1, settings)


def evolve_coupled(profile, lam, osc0, t1, pin0=None, settings=DEFAULT_SETTINGS):
    """Oscillator plus STANDARD Milne-Pinney equation on a single step sequence.

    ``pin0`` defaults to :func:`adiabatic_seed` at ``osc0.t``.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    check_domain(profile, [osc0.t, t1])
    if pin0 is None:
        pin0 = adiabatic_seed(profile, lam, osc0.t)
    _check_same_time(osc0, pin0)

    phi = scalar_evaluator(profile)

    def rhs(t, y):
        q, p, rho, rho_dot = y
        if rho <= 0:
            return np.full(4, np.inf)
        w = lam * phi(t)
        return np.array([p, -w * q, rho_dot, rho**-3 - w * rho])

    try:
        dense = integrate(rhs, [osc0.q, osc0.p, pin0.rho, pin0.rho_dot], osc0.t, t1, settings)
    except IntegrationError as exc:
        raise PinneyError("rho underflow", exc.t) from exc
    _check_rho_positive(dense, 2)
    return CoupledTrajectory(dense, profile, lam, Convention.STANDARD)
