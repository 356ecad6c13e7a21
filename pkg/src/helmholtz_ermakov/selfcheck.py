"""Built-in numerical checks with fixed tolerances, shared by the CLI and tests.

Each check returns a :class:`CheckResult` holding the worst observed error,
the limit it is held to, and the wall time.  The oracles used here are
independent of the code paths they check: a finite-difference eigenproblem
for the spectrum, elementary Bessel forms, and a direct matrix-element
quadrature for the Lewis phase.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import adiabatic, phases, quantum, specfun
from .ermakov import Convention, OscState, PinneyState, evolve_coupled, solve_pinney
from .ode import IntegrationSettings
from .profiles import Constant, Periodic, PowerLaw
from .spectrum import SpectrumProblem, finite_difference_eigenvalues, solve_dirichlet_eigenvalues

TIGHT = IntegrationSettings(rel_tol=1e-10, abs_tol=1e-12)
PERIODIC = Periodic(1.0, 0.1, 2 * math.pi)


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    error: float
    limit: float
    seconds: float
    time_limit: float = math.inf

    @property
    def passed(self):
        return bool(self.error <= self.limit and self.seconds <= self.time_limit)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.seconds:.2f}s"
        if math.isfinite(self.time_limit):
            timing += f" (limit {self.time_limit:g}s)"
        return f"{status} {self.key} {self.title}: error={self.error:.3e} limit={self.limit:.1e} {timing}"


def _timed(fn):
    start = time.perf_counter()
    err = fn()
    return float(err), time.perf_counter() - start


def invariant_drift():
    def run():
        traj = evolve_coupled(PERIODIC, 4.0, OscState(0.0, 1.0, 0.0), 50.0, settings=TIGHT)
        inv = traj.invariant(traj.dense.ts)
        return np.max(np.abs(inv - inv[0])) / abs(inv[0])

    err, sec = _timed(run)
    return CheckResult("C1", "Ermakov invariant drift, periodic profile, t in [0, 50]", err, 1e-8, sec, 1.0)


def dirichlet_spectrum():
    def run():
        exact = np.arange(1, 11) ** 2
        res = solve_dirichlet_eigenvalues(SpectrumProblem(Constant(1.0), (0.0, math.pi), 10))
        err_const = np.max(np.abs(res.eigenvalues - exact))
        linear = PowerLaw(1.0, 1.0)
        got = solve_dirichlet_eigenvalues(SpectrumProblem(linear, (0.0, 1.0), 3)).eigenvalues
        ref = finite_difference_eigenvalues(linear, (0.0, 1.0), 3, points=2000)
        err_linear = np.max(np.abs(got - ref) / ref)
        # both parts share one pass/fail: scale so that 1.0 marks each limit
        return max(err_const / 1e-8, err_linear / 1e-4)

    err, sec = _timed(run)
    return CheckResult("C2", "Dirichlet spectrum (n^2 and x-profile vs finite differences), scaled", err, 1.0, sec, 5.0)


def hankel_closed_form():
    def run():
        case = adiabatic.PowerLawCase(1.0, 2.0, 10.0)
        t = np.linspace(0.5, 2.0, 20)
        res = adiabatic.rescaled_residual(case.profile, case.lam, t, adiabatic.hankel_derivatives(case, t))
        flat = adiabatic.PowerLawCase(1.7, 0.0, 10.0)
        rho = adiabatic.hankel_derivatives(flat, t)[0]
        return max(np.max(np.abs(res)) / 1e-8, np.max(np.abs(rho - 1.7**-0.5)) / 1e-12)

    err, sec = _timed(run)
    return CheckResult("C3", "Hankel-product rho: residual (m=2) and constant limit (m=0), scaled", err, 1.0, sec)


def polynomial_closed_form():
    def run():
        case = adiabatic.PolynomialCase(1, 1.0, 5.0)
        t = np.array([0.5, 1.0, 2.0])
        res = adiabatic.rescaled_residual(case.profile, case.lam, t, adiabatic.polynomial_derivatives(case, t))
        return np.max(np.abs(res))

    err, sec = _timed(run)
    return CheckResult("C4", "finite-sum rho residual, Lewis index 1", err, 1e-10, sec)


def powerlaw_geometric_angle():
    def run():
        worst = 0.0
        for m, b in [(2.0, 1.0), (1.0, 0.5), (-1.0, 2.0)]:
            path = adiabatic.leading_path(PowerLaw(b, m), 1.0, 2.0)
            quad = phases.geometric_angle(path, 1.0, 2.0)
            worst = max(worst, abs(quad - adiabatic.geometric_angle_powerlaw(m, b, 1.0, 2.0)) / 1e-8)
        exact = abs(adiabatic.geometric_angle_powerlaw(2.0, 1.0, 1.0, 2.0) - 3 / 32) / 1e-10
        return max(worst, exact)

    err, sec = _timed(run)
    return CheckResult("C5", "power-law geometric angle, quadrature vs closed form, scaled", err, 1.0, sec)


def cycle_identities():
    def run():
        pin = solve_pinney(Constant(1.0), 1.0, PinneyState(0.0, 2.0, 0.0), math.pi, settings=TIGHT)
        hannay = phases.hannay_angle(pin, math.pi)
        geo = phases.geometric_angle(pin, 0.0, math.pi)
        ulp = 0.0
        for n in range(4):
            expected = -(n + 0.5) * hannay
            ulp = max(ulp, abs(phases.berry_phase(n, pin, math.pi) - expected) / np.spacing(abs(expected)))
        sign = 0.0 if hannay <= 0 else math.inf
        return max(abs(geo - hannay) / 1e-8, ulp / 4, sign)

    err, sec = _timed(run)
    return CheckResult("C6", "closed-cycle geometric = Hannay, Berry = -(n+1/2) Hannay, scaled", err, 1.0, sec)


def angle_decomposition():
    def run():
        worst = 0.0
        for profile, lam in [(Constant(1.0), 2.0), (PERIODIC, 4.0)]:
            traj = evolve_coupled(profile, lam, OscState(0.0, 1.0, 0.3), 20.0, settings=TIGHT)
            path = traj.pinney
            rep = phases.angle_report(path, 0.0, 20.0)
            total = phases.inverse_rho_squared_integral(path, 0.0, 20.0)
            theta = traj.unwrapped_angle([0.0, 20.0])
            worst = max(worst, abs(rep.total - total), abs(total - (theta[1] - theta[0])))
        return worst

    err, sec = _timed(run)
    return CheckResult("C7", "dynamical + geometric = integral of 1/rho^2 = unwrapped angle", err, 1e-6, sec)


def lewis_phase_oracle(n, path, t0, t1, lam, profile, panels=60, order=8, grid=512, h=1e-5):
    """Integral over [t0, t1] of <psi_n| i d/dt - H |psi_n> by direct quadrature.

    The time derivative is a central difference along (rho_dot, rho_ddot),
    the kinetic term is spectral on a uniform q grid.
    """
    from .profiles import eval_profile

    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(t0, t1, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        for xi, wi in zip(x, w):
            t = 0.5 * (a + b) + 0.5 * (b - a) * xi
            r, rd, rdd = path.rho_derivatives(t)
            half = 1.5 * quantum.quadrature_half_width(n, PinneyState(t, r, rd))
            q = np.linspace(-half, half, grid, endpoint=False)
            dq = q[1] - q[0]
            psi = quantum.eigenfunction_value(n, q, PinneyState(t, r, rd))
            ahead = quantum.eigenfunction_value(n, q, PinneyState(t, r + h * rd, rd + h * rdd))
            behind = quantum.eigenfunction_value(n, q, PinneyState(t, r - h * rd, rd - h * rdd))
            dpsi = (ahead - behind) / (2 * h)
            hpsi = quantum.apply_hamiltonian(psi, q, lam * eval_profile(profile, t))
            rate = np.sum(np.conj(psi) * (1j * dpsi - hpsi)) * dq
            total += 0.5 * (b - a) * wi * rate.real
    return total


def lewis_phase_check():
    def run():
        lam, t1 = 4.0, 10.0
        traj = evolve_coupled(PERIODIC, lam, OscState(0.0, 1.0, 0.0), t1, settings=TIGHT)
        worst = 0.0
        for n in range(3):
            closed = phases.lewis_phase(n, traj.pinney, 0.0, t1)
            oracle = lewis_phase_oracle(n, traj.pinney, 0.0, t1, lam, PERIODIC)
            worst = max(worst, abs(closed - oracle))
        static = adiabatic.leading_path(Constant(1.0), 0.0, 7.0, lam=1.0, convention=Convention.STANDARD)
        for n in range(3):
            worst = max(worst, abs(phases.lewis_phase(n, static, 0.0, 7.0) + (n + 0.5) * 7.0))
        return worst

    err, sec = _timed(run)
    return CheckResult("C8", "Lewis phase vs matrix-element quadrature, n = 0..2", err, 1e-6, sec)


def orthonormality():
    def run():
        pin = PinneyState(0.0, 3.0, 1.7)
        return max(
            abs(quantum.inner_product(m, n, pin) - (1.0 if m == n else 0.0))
            for m in range(6)
            for n in range(6)
        )

    err, sec = _timed(run)
    return CheckResult("C9", "invariant eigenfunction orthonormality, m, n <= 5", err, 1e-8, sec)


def bessel_identities():
    def run():
        x = np.linspace(0.1, 50.0, 500)
        wr = 0.0
        for nu in np.linspace(0.0, 5.0, 21):
            j, y, jp, yp = specfun.bessel_jyd(nu, x)
            exact = 2 / (np.pi * x)
            wr = max(wr, np.max(np.abs((j * yp - jp * y) - exact) / exact))
        env = np.sqrt(2 / (np.pi * x))
        s, c = np.sin(x), np.cos(x)
        forms = {
            0.5: (env * s, -env * c),
            -0.5: (env * c, env * s),
            1.5: (env * (s / x - c), -env * (c / x + s)),
            2.5: (env * ((3 / x**2 - 1) * s - 3 * c / x), -env * ((3 / x**2 - 1) * c + 3 * s / x)),
        }
        half = 0.0
        for nu, (j_ref, y_ref) in forms.items():
            j, y, _, _ = specfun.bessel_jyd(nu, x)
            # measured against the envelope since the elementary forms cancel at small x
            scale = env * np.maximum(1.0, np.abs(y_ref) / env)
            half = max(half, np.max(np.abs(j - j_ref) / scale), np.max(np.abs(y - y_ref) / scale))
        return max(wr / 1e-10, half / 1e-12)

    err, sec = _timed(run)
    return CheckResult("C10", "Bessel Wronskian and half-integer forms, scaled", err, 1.0, sec)


def adiabatic_convergence():
    def run():
        t = np.linspace(0.0, 2 * math.pi, 201)
        peak = []
        for lam in (1e2, 1e4):
            derivs = adiabatic.leading_derivatives(PERIODIC, t)
            peak.append(np.max(np.abs(adiabatic.rescaled_residual(PERIODIC, lam, t, derivs))))
        return peak[1] / peak[0]

    err, sec = _timed(run)
    return CheckResult("C11", "leading-term residual ratio, lambda 1e4 vs 1e2", err, 0.02, sec)


CHECKS = {
    "C1": invariant_drift,
    "C2": dirichlet_spectrum,
    "C3": hankel_closed_form,
    "C4": polynomial_closed_form,
    "C5": powerlaw_geometric_angle,
    "C6": cycle_identities,
    "C7": angle_decomposition,
    "C8": lewis_phase_check,
    "C9": orthonormality,
    "C10": bessel_identities,
    "C11": adiabatic_convergence,
}


def run_checks(keys=None):
    keys = list(CHECKS) if keys is None else keys
    return [CHECKS[k]() for k in keys]
