"""Real-order Bessel functions and the Hankel modulus J^2 + Y^2.

Values for non-negative orders come from the AMOS routines wrapped by
``scipy.special``; negative orders are reduced here with the connection
formulas

    J_{-v} = cos(v pi) J_v - sin(v pi) Y_v
    Y_{-v} = sin(v pi) J_v + cos(v pi) Y_v.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import DomainError

MAX_ORDER = 50.0


@dataclass(frozen=True)
class BesselPair:
    nu: float
    x: float
    J: float
    Y: float
    J_prime: float
    Y_prime: float

    @property
    def wronskian(self):
        return self.J * self.Y_prime - self.J_prime * self.Y

    @property
    def hankel_product(self):
        """H1 H2 = J^2 + Y^2."""
        return self.J**2 + self.Y**2


def _check(nu, x):
    x = np.asarray(x, dtype=float)
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise DomainError(f"order must satisfy |nu| <= {MAX_ORDER}")
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise DomainError("argument must be positive and finite")
    return x


def _half_turn(nu):
    # cos(nu pi), sin(nu pi) exact at integers and half-integers
    two = 2 * nu
    if two == round(two):
        k = int(round(two)) % 4
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k]
    return math.cos(math.pi * nu), math.sin(math.pi * nu)


def bessel_jyd(nu, x):
    """(J, Y, J', Y') of real order ``nu``; vectorized over positive ``x``."""
    x = _check(nu, x)
    v = abs(nu)
    j, y = special.jv(v, x), special.yv(v, x)
    jp, yp = special.jvp(v, x), special.yvp(v, x)
    if nu < 0:
        c, s = _half_turn(v)
        j, y = c * j - s * y, s * j + c * y
        jp, yp = c * jp - s * yp, s * jp + c * yp
    return j, y, jp, yp


def bessel_jy(nu, x):
    """Bessel functions of both kinds and their derivatives at one point."""
    j, y, jp, yp = bessel_jyd(nu, x)
    return BesselPair(float(nu), float(x), float(j), float(y), float(jp), float(yp))


def hankel_product(nu, x):
    """H^(1)_nu(x) H^(2)_nu(x) = J_nu(x)^2 + Y_nu(x)^2 (real, positive)."""
    j, y, _, _ = bessel_jyd(nu, x)
    val = j * j + y * y
    return float(val) if np.ndim(x) == 0 else val


def hankel_product_derivatives(nu, x):
    """(u, u', u'') for u(x) = J_nu(x)^2 + Y_nu(x)^2, vectorized over ``x``.

    Second derivatives of J and Y come from Bessel's equation.
    """
    j, y, jp, yp = bessel_jyd(nu, x)
    x = np.asarray(x, dtype=float)
    shape = 1 - nu * nu / (x * x)
    jpp = -jp / x - shape * j
    ypp = -yp / x - shape * y
    u = j * j + y * y
    du = 2 * (j * jp + y * yp)
    d2u = 2 * (jp * jp + yp * yp + j * jpp + y * ypp)
    return u, du, d2u
