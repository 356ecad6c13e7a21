"""Eigenfunctions of the quantum Ermakov invariant (hbar = 1).

The invariant I = [(rho p - rho_dot q)^2 + q^2/rho^2] / 2 has eigenvalues
kappa_n = n + 1/2 and normalized eigenfunctions

    psi_n(q) = N_n rho^(-1/2) exp(i rho_dot q^2 / (2 rho))
               exp(-q^2 / (2 rho^2)) H_n(q / rho),
    N_n = (sqrt(pi) 2^n n!)^(-1/2).

The chirp factor is the unitary transform exp(-i rho_dot q^2 / (2 rho))
undone; the rest is an oscillator eigenstate in the variable q / rho.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .exceptions import DomainError, QuadratureError

HBAR = 1.0
MAX_LEVEL = 60


def _check_level(n):
    if int(n) != n or n < 0:
        raise DomainError("quantum number must be a non-negative integer")
    if n > MAX_LEVEL:
        raise DomainError(f"levels above {MAX_LEVEL} are not supported")
    return int(n)


def hermite(n, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    n = _check_level(n)
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if x.ndim else float(h_prev)
    h = 2 * x
    for k in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h if x.ndim else float(h)


def normalization(n):
    n = _check_level(n)
    return (math.sqrt(math.pi) * 2.0**n * math.factorial(n) * math.sqrt(HBAR)) ** -0.5


def invariant_eigenvalue(n):
    return HBAR * (_check_level(n) + 0.5)


def eigenfunction_value(n, q, pin):
    """psi_n(q) at the Pinney state ``pin``; vectorized over ``q``."""
    n = _check_level(n)
    q = np.asarray(q, dtype=float)
    rho, rho_dot = pin.rho, pin.rho_dot
    x = q / (math.sqrt(HBAR) * rho)
    envelope = normalization(n) * rho**-0.5 * np.exp(-0.5 * x * x) * hermite(n, x)
    val = envelope * np.exp(1j * rho_dot * q * q / (2 * rho * HBAR))
    return complex(val) if q.ndim == 0 else val


@dataclass(frozen=True)
class Eigenfunction:
    """psi_n frozen at one Pinney state."""

    n: int
    pin: object

    def __post_init__(self):
        _check_level(self.n)

    @property
    def normalization(self):
        return normalization(self.n)

    @property
    def eigenvalue(self):
        return invariant_eigenvalue(self.n)

    def __call__(self, q):
        return eigenfunction_value(self.n, q, self.pin)


def quadrature_half_width(n, pin):
    return pin.rho * (8 + 2 * math.sqrt(2 * n + 1)) * math.sqrt(HBAR)


def inner_product(m, n, pin, tol=1e-12):
    """<psi_m | psi_n> by adaptive quadrature over [-L, L]."""
    m, n = _check_level(m), _check_level(n)
    half = quadrature_half_width(max(m, n), pin)

    def part(fn):
        val, err = quad(fn, -half, half, epsabs=tol, epsrel=tol, limit=400)
        if err > 1e-9:
            raise QuadratureError(f"inner product did not converge (error estimate {err:.2e})")
        return val

    def integrand(q):
        return np.conj(eigenfunction_value(m, q, pin)) * eigenfunction_value(n, q, pin)

    return complex(part(lambda q: integrand(q).real), part(lambda q: integrand(q).imag))


@dataclass(frozen=True)
class Superposition:
    """Constant expansion coefficients C_n of a solution in the invariant eigenbasis."""

    coefficients: Sequence[complex]

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise DomainError("need a non-empty coefficient list")
        if not math.isclose(float(np.sum(np.abs(c) ** 2)), 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError("coefficients must satisfy sum |C_n|^2 = 1")
        object.__setattr__(self, "coefficients", tuple(complex(x) for x in c))

    @classmethod
    def normalized(cls, coefficients):
        c = np.asarray(coefficients, dtype=complex)
        return cls(c / np.sqrt(np.sum(np.abs(c) ** 2)))


def superpose(sup, q, pin, phases):
    """sum_n C_n exp(i alpha_n) psi_n(q) with ``phases[n] = alpha_n``."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (len(sup.coefficients),):
        raise DomainError(
            f"got {phases.size} phases for {len(sup.coefficients)} coefficients"
        )
    q = np.asarray(q, dtype=float)
    total = np.zeros(q.shape, dtype=complex)
    for n, (c, alpha) in enumerate(zip(sup.coefficients, phases)):
        if c != 0:
            total = total + c * np.exp(1j * alpha) * eigenfunction_value(n, q, pin)
    return complex(total) if q.ndim == 0 else total


def superposition_phases(sup, path, t0, t):
    """Lewis phases alpha_n(t) for every level present in ``sup``."""
    from .phases import inverse_rho_squared_integral

    total = inverse_rho_squared_integral(path, t0, t)
    return np.array([-(n + 0.5) * total for n in range(len(sup.coefficients))])


# ---------------------------------------------------------------------------
# grid operators (spectral derivatives on a uniform, effectively periodic grid)


def _wavenumbers(q):
    dq = q[1] - q[0]
    return 2 * np.pi * np.fft.fftfreq(q.size, d=dq)


def spectral_derivative(values, q, order=1):
    """d^k/dq^k of samples that decay to zero at both grid ends."""
    k = _wavenumbers(np.asarray(q))
    return np.fft.ifft((1j * k) ** order * np.fft.fft(values))


def apply_invariant(values, q, pin):
    """(I psi)(q) with I = [(rho p - rho_dot q)^2 + q^2 / rho^2] / 2, p = -i d/dq."""

    def a(psi):
        return pin.rho * (-1j * HBAR) * spectral_derivative(psi, q) - pin.rho_dot * q * psi

    return 0.5 * (a(a(values)) + q**2 / pin.rho**2 * values)


def apply_hamiltonian(values, q, lam_phi):
    """(H psi)(q) with H = p^2/2 + lam_phi q^2/2."""
    return -0.5 * HBAR**2 * spectral_derivative(values, q, 2) + 0.5 * lam_phi * q**2 * values
