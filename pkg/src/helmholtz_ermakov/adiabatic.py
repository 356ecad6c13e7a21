"""Adiabatic (large lambda) Milne-Pinney solutions and the rescaled invariant.

With adiabaticity parameter 1/sqrt(lambda), the Hamiltonian is written as
H = sqrt(lambda)/2 (p^2 + phi q^2), the Pinney equation becomes

    rho'' / lambda + phi rho = 1 / rho^3           (the RESCALED convention)

and the invariant is (rho p - rho_dot q / sqrt(lambda))^2 / 2 + q^2 / (2 rho^2).

For power-law profiles phi = b^2 t^m the equation has the exact solution

    rho^2 = g2 pi sqrt(lambda) / (m + 2) * t * (J_beta(y)^2 + Y_beta(y)^2),
    beta = 1 / (m + 2),  y = 2 b sqrt(lambda) t^(m/2 + 1) / (m + 2),

which is O(1) in 1/sqrt(lambda) and tends to the leading term phi^(-1/4).
When m = -4n/(2n+1) the Hankel functions are elementary and rho is a
finite sum.  Results here are in the RESCALED convention unless stated.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ermakov import (
    Convention,
    CoupledTrajectory,
    OscState,
    PinneyState,
    full_angle,
    pinney_residual,
)
from .exceptions import DomainError, IntegrationError, PinneyError
from .ode import DEFAULT_SETTINGS, integrate
from .phases import AnalyticRho
from .profiles import PowerLaw, check_domain, eval_profile, profile_derivative, scalar_evaluator
from .specfun import hankel_product_derivatives


def _sign(x):
    return 1 if x > 0 else -1


def _check_unit(name, value):
    if value not in (1, -1):
        raise DomainError(f"{name} must be +1 or -1")


@dataclass(frozen=True)
class PowerLawCase:
    """Power-law profile Omega = b t^(m/2) at a given lambda, with the sign choices."""

    b: float
    m: float
    lam: float
    gamma1: int = 1
    gamma2: Optional[int] = None

    def __post_init__(self):
        PowerLaw(self.b, self.m)  # validates b and m
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        _check_unit("gamma1", self.gamma1)
        if self.gamma2 is None:
            object.__setattr__(self, "gamma2", _sign(self.m + 2))
        _check_unit("gamma2", self.gamma2)

    @property
    def profile(self):
        return PowerLaw(self.b, self.m)

    @property
    def beta(self):
        return 1.0 / (self.m + 2)

    @property
    def adiabaticity(self):
        return 1.0 / math.sqrt(self.lam)

    def slow_time(self, t):
        return np.asarray(t) / math.sqrt(self.lam)

    def hankel_argument(self, t):
        """y(t); negative when m < -2."""
        return 2 * self.b * math.sqrt(self.lam) * np.asarray(t, dtype=float) ** (self.m / 2 + 1) / (self.m + 2)


@dataclass(frozen=True)
class PolynomialCase:
    """The family m = -4n/(2n+1) for which rho is a finite sum (n is the Lewis index)."""

    n: int
    b: float
    lam: float
    gamma1: int = 1
    gamma2: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n == 0:
            raise DomainError("Lewis index n must be a non-zero integer")
        if self.n < 0:
            raise DomainError("negative Lewis indices are not supported (factorials undefined)")
        if not self.b > 0:
            raise DomainError("b must be positive")
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        _check_unit("gamma1", self.gamma1)
        _check_unit("gamma2", self.gamma2)
        if self.gamma2 != 1:
            raise DomainError("gamma2 = -1 makes gamma2^(1/2) imaginary")

    @property
    def m(self):
        return -4 * self.n / (2 * self.n + 1)

    @property
    def profile(self):
        return PowerLaw(self.b, self.m)

    def series_coefficients(self):
        """Complex c_k, k = 0..n, of the sum in t^(-k/(2n+1))."""
        n = self.n
        z = 1 / (math.sqrt(self.lam) * 2j * self.b * (2 * n + 1))
        return np.array([
            (-1) ** k * math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k)) * z**k
            for k in range(n + 1)
        ])


def _positive_t(t):
    t = np.asarray(t, dtype=float)
    if not np.all(t > 0):
        raise DomainError("closed-form rho requires t > 0")
    return t


def _to_state(t, rho, rho_dot):
    if not rho > 0:
        raise DomainError("the chosen sign gamma1 = -1 gives rho < 0")
    return PinneyState(float(t), float(rho), float(rho_dot))


def hankel_derivatives(case, t):
    """(rho, rho_dot, rho_ddot) of the Hankel-product solution, vectorized over t."""
    t = _positive_t(t)
    k = case.gamma2 * math.pi * math.sqrt(case.lam) / (case.m + 2)
    if not k > 0:
        raise DomainError("negative radicand: gamma2 must equal sign(m + 2)")
    e = (case.m + 2) / 2
    c = 2 * case.b * math.sqrt(case.lam) / abs(case.m + 2)
    y = c * t**e
    dy = c * e * t ** (e - 1)
    d2y = c * e * (e - 1) * t ** (e - 2)
    u, du, d2u = hankel_product_derivatives(abs(case.beta), y)
    p = k * t * u
    dp = k * (u + t * du * dy)
    d2p = k * (2 * du * dy + t * d2u * dy**2 + t * du * d2y)
    rho = np.sqrt(p)
    rho_dot = dp / (2 * rho)
    rho_ddot = (d2p / 2 - rho_dot**2) / rho
    return case.gamma1 * rho, case.gamma1 * rho_dot, case.gamma1 * rho_ddot


def rho_powerlaw_hankel(case, t):
    """Exact RESCALED Pinney state built from the Hankel modulus."""
    rho, rho_dot, _ = hankel_derivatives(case, float(t))
    return _to_state(t, rho, rho_dot)


def polynomial_derivatives(case, t):
    """(rho, rho_dot, rho_ddot) of the finite-sum solution, vectorized over t."""
    t = _positive_t(t)
    s = 1 / (2 * case.n + 1)
    coeffs = case.series_coefficients()
    k = np.arange(case.n + 1)
    tt = np.atleast_1d(t)[:, None]
    terms = coeffs * tt ** (-k * s)
    big_s = terms.sum(axis=1)
    ds = (terms * (-k * s)).sum(axis=1) / tt[:, 0]
    d2s = (terms * (-k * s) * (-k * s - 1)).sum(axis=1) / tt[:, 0] ** 2
    a = np.abs(big_s)
    re1 = (np.conj(big_s) * ds).real
    da = re1 / a
    d2a = (np.abs(ds) ** 2 + (np.conj(big_s) * d2s).real) / a - re1**2 / a**3
    tt = tt[:, 0]
    power = case.n * s
    r = tt**power
    dr = power * tt ** (power - 1)
    d2r = power * (power - 1) * tt ** (power - 2)
    scale = case.gamma1 * case.b**-0.5
    rho = scale * r * a
    rho_dot = scale * (dr * a + r * da)
    rho_ddot = scale * (d2r * a + 2 * dr * da + r * d2a)
    if np.ndim(t) == 0:
        return float(rho[0]), float(rho_dot[0]), float(rho_ddot[0])
    return rho, rho_dot, rho_ddot


def rho_powerlaw_polynomial(case, t):
    rho, rho_dot, _ = polynomial_derivatives(case, float(t))
    return _to_state(t, rho, rho_dot)


def leading_derivatives(profile, t, lam=None, convention=Convention.RESCALED):
    """(rho0, rho0_dot, rho0_ddot) for rho0 = phi^(-1/4), vectorized.

    Under STANDARD everything is scaled by lambda^(-1/4).
    """
    phi = np.asarray(eval_profile(profile, t))
    if not np.all(phi > 0):
        raise DomainError("phi must be positive")
    d1 = np.asarray(profile_derivative(profile, t, 1))
    d2 = np.asarray(profile_derivative(profile, t, 2))
    rho = phi**-0.25
    rho_dot = -0.25 * phi**-1.25 * d1
    rho_ddot = 0.3125 * phi**-2.25 * d1**2 - 0.25 * phi**-1.25 * d2
    if convention is Convention.STANDARD:
        if lam is None:
            raise DomainError("STANDARD scaling needs lambda")
        k = lam**-0.25
        rho, rho_dot, rho_ddot = k * rho, k * rho_dot, k * rho_ddot
    if np.ndim(t) == 0:
        return float(rho), float(rho_dot), float(rho_ddot)
    return rho, rho_dot, rho_ddot


def rho_adiabatic_leading(profile, t, lam=None, convention=Convention.RESCALED):
    """Leading adiabatic term rho0 = phi(t)^(-1/4) and its derivative."""
    rho, rho_dot, _ = leading_derivatives(profile, float(t), lam, convention)
    return PinneyState(float(t), rho, rho_dot)


def rescaled_residual(profile, lam, t, derivatives):
    """rho''/lambda + phi rho - 1/rho^3 for a (rho, rho_dot, rho_ddot) triple."""
    rho, _, rho_ddot = derivatives
    return pinney_residual(profile, lam, Convention.RESCALED, t, rho, rho_ddot)


def geometric_angle_powerlaw(m, b, t0, t):
    """Closed-form geometric angle of rho0 on a power-law profile."""
    if m == -2:
        raise DomainError("m must differ from -2")
    if not (t0 > 0 and t > 0):
        raise DomainError("t and t0 must be positive")
    e = -(m / 2 + 1)
    return -(m / (4 * b * (m + 2))) * (t**e - t0**e)


# ---------------------------------------------------------------------------
# rho sources for the phase functionals


def leading_path(profile, t0, t1, lam=None, convention=Convention.RESCALED, panels=16):
    check_domain(profile, [t0, t1])
    return AnalyticRho(
        lambda t: leading_derivatives(profile, t, lam, convention), t0, t1, panels, convention
    )


def _rescale(derivs, k):
    return tuple(k * d for d in derivs)


def hankel_path(case, t0, t1, convention=Convention.RESCALED, panels=16):
    k = 1.0 if convention is Convention.RESCALED else case.lam**-0.25
    return AnalyticRho(
        lambda t: _rescale(hankel_derivatives(case, t), k), t0, t1, panels, convention
    )


def polynomial_path(case, t0, t1, convention=Convention.RESCALED, panels=16):
    k = 1.0 if convention is Convention.RESCALED else case.lam**-0.25
    return AnalyticRho(
        lambda t: _rescale(polynomial_derivatives(case, t), k), t0, t1, panels, convention
    )


# ---------------------------------------------------------------------------
# 1/sqrt(lambda)-dependent invariant


def rescaled_invariant(osc, pin, lam):
    """(rho p - rho_dot q / sqrt(lambda))^2 / 2 + q^2 / (2 rho^2) for RESCALED rho."""
    if abs(osc.t - pin.t) > 1e-12 * max(1.0, abs(osc.t)):
        raise DomainError(f"oscillator at t={osc.t} but Pinney state at t={pin.t}")
    return (pin.rho * osc.p - pin.rho_dot * osc.q / math.sqrt(lam)) ** 2 / 2 + osc.q**2 / (
        2 * pin.rho**2
    )


def to_standard_variables(osc, pin, lam):
    """Map rescaled (q, p, RESCALED rho) to the original oscillator and STANDARD rho.

    The rescaled invariant of the inputs equals the standard invariant of
    the outputs.
    """
    k = lam**0.25
    return (
        OscState(osc.t, osc.q / k, osc.p * k),
        PinneyState(pin.t, pin.rho / k, pin.rho_dot / k),
    )


class RescaledTrajectory(CoupledTrajectory):
    """Coupled (q, p, rho, rho_dot) under H = sqrt(lambda)/2 (p^2 + phi q^2) and RESCALED rho."""

    def __init__(self, dense, profile, lam):
        super().__init__(dense, profile, lam, Convention.RESCALED)

    def invariant(self, t):
        q, p, rho, rho_dot = np.atleast_2d(self.dense(t)).T
        val = (rho * p - rho_dot * q / math.sqrt(self.lam)) ** 2 / 2 + q**2 / (2 * rho**2)
        return float(val[0]) if np.ndim(t) == 0 else val

    def _angle(self, y):
        q, p, rho, rho_dot = y.T
        return full_angle(q, p, rho, rho_dot, 1 / math.sqrt(self.lam))


def evolve_rescaled(profile, lam, osc0, t1, pin0=None, settings=DEFAULT_SETTINGS):
    """Integrate the rescaled oscillator with the RESCALED Pinney equation.

    ``pin0`` defaults to rho0 = phi(t0)^(-1/4), rho_dot = 0.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    check_domain(profile, [osc0.t, t1])
    if pin0 is None:
        pin0 = PinneyState(osc0.t, eval_profile(profile, osc0.t) ** -0.25, 0.0)
    root = math.sqrt(lam)
    phi_of = scalar_evaluator(profile)

    def rhs(t, y):
        q, p, rho, rho_dot = y
        if rho <= 0:
            return np.full(4, np.inf)
        phi = phi_of(t)
        return np.array([root * p, -root * phi * q, rho_dot, lam * (rho**-3 - phi * rho)])

    try:
        dense = integrate(rhs, [osc0.q, osc0.p, pin0.rho, pin0.rho_dot], osc0.t, t1, settings)
    except IntegrationError as exc:
        raise PinneyError("rho underflow", exc.t) from exc
    if np.any(dense.ys[:, 2] <= 0):
        raise PinneyError("rho left the positive half-line")
    return RescaledTrajectory(dense, profile, lam)
