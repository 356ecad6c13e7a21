"""Dirichlet eigenvalues of psi'' + lambda phi(x) psi = 0 by shooting.

For phi > 0 on the open interval the number of interior zeros of the
solution with psi(a) = 0, psi'(a) = 1 increases by one each time lambda
passes an eigenvalue.  Brackets come from node counts; each bracket holds
exactly one sign change of psi(b; lambda), which Brent's method refines.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .ermakov import oscillator_rhs
from .exceptions import DomainError, SpectrumError
from .ode import DEFAULT_SETTINGS, IntegrationSettings, integrate
from .profiles import check_domain, eval_profile

# interpolant samples per step when scanning for sign changes
_SCAN_POINTS = 4
LAMBDA_CAP_FACTOR = 1e6
# node counts only need the zero pattern, not tight boundary values
COUNT_SETTINGS = IntegrationSettings(rel_tol=1e-7, abs_tol=1e-9)
# irrational offset keeps bracket probes off round eigenvalues such as n^2
_START_FRACTION = 0.5 / 1.0905077326652577


@dataclass(frozen=True)
class SpectrumProblem:
    profile: object
    interval: Tuple[float, float]
    count: int
    tol: float = 1e-10
    settings: IntegrationSettings = DEFAULT_SETTINGS
    grid_points: int = 1001

    def __post_init__(self):
        a, b = self.interval
        if not a < b:
            raise DomainError("interval must satisfy x_min < x_max")
        if self.count < 1:
            raise DomainError("count must be at least 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise DomainError("grid_points must be odd and at least 3")
        check_domain(self.profile, [a, b])

    @property
    def length(self):
        return self.interval[1] - self.interval[0]


@dataclass(frozen=True)
class Eigenpair:
    n: int
    eigenvalue: float
    nodes: int
    boundary_residual: float
    x: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SpectrumResult:
    problem: SpectrumProblem
    pairs: List[Eigenpair]

    @property
    def eigenvalues(self):
        return np.array([p.eigenvalue for p in self.pairs])


def _shoot(problem, lam, settings=None):
    a, b = problem.interval
    settings = problem.settings if settings is None else settings
    return integrate(oscillator_rhs(problem.profile, lam), [0.0, 1.0], a, b, settings)


def _interior_zeros(dense, a, b):
    """Zeros of psi strictly inside (a, b), located by sign change then bisection."""
    s = np.linspace(0.0, 1.0, _SCAN_POINTS + 1)[1:]
    lo, hi = dense.ts[:-1, None], dense.ts[1:, None]
    grid = (lo + (hi - lo) * s).ravel()
    psi = dense(grid)[:, 0]
    # the first sample after x = a is positive since psi'(a) = 1
    signs = np.sign(psi)
    change = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    margin = 1e-9 * (b - a)
    zeros = []
    for i in change:
        x0 = brentq(lambda x: dense(x)[0], grid[i], grid[i + 1], xtol=1e-14)
        if x0 < b - margin:
            zeros.append(x0)
    return zeros


def count_nodes(problem, lam, settings=None):
    """(number of interior zeros, psi(x_max)) for the shooting solution at ``lam``."""
    a, b = problem.interval
    dense = _shoot(problem, lam, settings)
    return len(_interior_zeros(dense, a, b)), float(dense.ys[-1, 0])


def _phi_samples(problem):
    a, b = problem.interval
    x = np.linspace(a, b, 2001)
    interior = x[1:-1]
    phi = eval_profile(problem.profile, interior)
    if np.any(phi <= 0):
        bad = interior[np.argmax(phi <= 0)]
        raise DomainError(f"phi must be positive on the interval (phi <= 0 at x={bad})")
    return phi


def _bracket(problem, k, known, cap):
    """[lo, hi] with N(lo) = k - 1 and N(hi) = k, extending ``known`` evaluations."""

    def nodes(lam):
        if lam not in known:
            known[lam] = count_nodes(problem, lam, COUNT_SETTINGS)[0]
        return known[lam]

    below = [lam for lam, n in known.items() if n <= k - 1]
    above = [lam for lam, n in known.items() if n >= k]
    lo = max(below)
    if above:
        hi = min(above)
    else:
        hi = lo
        while True:
            hi *= 1.9
            if hi > cap:
                raise SpectrumError(f"no eigenvalue {k} below the search cap lambda={cap:.3g}")
            if nodes(hi) >= k:
                break
            lo = hi
    while not (nodes(lo) == k - 1 and nodes(hi) == k):
        mid = 0.5 * (lo + hi)
        if nodes(mid) <= k - 1:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            raise SpectrumError(f"could not isolate eigenvalue {k} near lambda={lo:.17g}")
    return lo, hi


def _refine(problem, k, known, cap, shots):
    """Eigenvalue k from a node-count bracket, checking psi(b) signs at both ends.

    psi(b) has sign (-1)^(k-1) just below lambda_k and (-1)^k just above.  A
    bracket end that sits numerically on an eigenvalue shows the wrong sign;
    the lower end then is the answer, an upper end is pulled inwards.
    """

    def boundary(x):
        if x not in shots:
            shots[x] = _shoot(problem, x)
        return shots[x].ys[-1, 0]

    lo, hi = _bracket(problem, k, known, cap)
    want_lo = 1.0 if k % 2 == 1 else -1.0
    while True:
        f_lo, f_hi = boundary(lo), boundary(hi)
        if np.sign(f_lo) != want_lo:
            return lo
        if np.sign(f_hi) == -want_lo:
            return brentq(boundary, lo, hi, xtol=problem.tol, rtol=4 * np.finfo(float).eps)
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            return hi
        n_mid = count_nodes(problem, mid, COUNT_SETTINGS)[0]
        known[mid] = n_mid
        if n_mid <= k - 1:
            lo = mid
        else:
            hi = mid


def _eigenfunction(problem, lam, dense):
    a, b = problem.interval
    x = np.linspace(a, b, problem.grid_points)
    psi = dense(x)[:, 0]
    norm = np.sqrt(simpson(psi**2, x=x))
    # sign convention psi'(a) > 0 holds already (shooting slope is +1)
    return x, psi / norm


def solve_dirichlet_eigenvalues(problem):
    """First ``problem.count`` Dirichlet eigenvalues with normalized eigenfunctions.

    Raises
    ------
    SpectrumError
        When an eigenvalue is not found below the search cap.
    DomainError
        When phi is not positive inside the interval.
    """
    phi = _phi_samples(problem)
    a, b = problem.interval
    est = (np.pi / problem.length) ** 2 / np.max(phi)
    cap = LAMBDA_CAP_FACTOR * est * problem.count**2
    # by Sturm comparison with phi_max no eigenvalue lies below est
    start = _START_FRACTION * est
    known = {start: count_nodes(problem, start, COUNT_SETTINGS)[0]}
    if known[start] != 0:
        raise SpectrumError("node count is not zero below the first eigenvalue estimate")

    pairs = []
    for k in range(1, problem.count + 1):
        shots = {}
        lam = _refine(problem, k, known, cap, shots)
        dense = shots[lam] if lam in shots else _shoot(problem, lam)
        x, psi = _eigenfunction(problem, lam, dense)
        norm_scale = np.max(np.abs(dense(x)[:, 0]))
        nodes = len(_interior_zeros(dense, a, b))
        pairs.append(
            Eigenpair(k, float(lam), nodes, float(abs(dense.ys[-1, 0]) / norm_scale), x, psi)
        )
    return SpectrumResult(problem, pairs)


def finite_difference_eigenvalues(profile, interval, count, points=2000):
    """Reference eigenvalues from the central-difference generalized eigenproblem.

    -D2 psi = lambda diag(phi) psi on ``points`` interior nodes, reduced to a
    symmetric tridiagonal problem.
    """
    from scipy.linalg import eigh_tridiagonal

    a, b = interval
    h = (b - a) / (points + 1)
    x = a + h * np.arange(1, points + 1)
    w = np.asarray(eval_profile(profile, x))
    if np.any(w <= 0):
        raise DomainError("phi must be positive on the interior grid")
    s = 1 / np.sqrt(w)
    diag = 2 / h**2 * s * s
    off = -1 / h**2 * s[:-1] * s[1:]
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1), eigvals_only=True)
