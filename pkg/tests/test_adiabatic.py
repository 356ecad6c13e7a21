import math

import numpy as np
import pytest

from helmholtz_ermakov import adiabatic, phases
from helmholtz_ermakov.adiabatic import (
    PolynomialCase,
    PowerLawCase,
    rescaled_residual,
    geometric_angle_powerlaw,
    hankel_derivatives,
    leading_derivatives,
    polynomial_derivatives,
    rho_adiabatic_leading,
    rho_powerlaw_hankel,
    rho_powerlaw_polynomial,
)
from helmholtz_ermakov.ermakov import (
    Convention,
    OscState,
    PinneyState,
    convert_pinney_state,
    ermakov_invariant,
    solve_pinney,
)
from helmholtz_ermakov.exceptions import DomainError
from helmholtz_ermakov.ode import IntegrationSettings
from helmholtz_ermakov.profiles import Constant, Periodic, PowerLaw, eval_profile

TIGHT = IntegrationSettings(rel_tol=1e-10, abs_tol=1e-12)
WIGGLE = Periodic(1.0, 0.1, 2 * math.pi)


# -- Hankel-product solution


def test_beta_for_quadratic_index():
    assert PowerLawCase(1.0, 2.0, 10.0).beta == 0.25


def test_default_signs():
    assert PowerLawCase(1.0, 1.0, 1.0).gamma2 == 1
    assert PowerLawCase(1.0, -3.0, 1.0).gamma2 == -1


def test_flat_profile_reduces_to_constant():
    t = np.linspace(0.1, 20.0, 50)
    for b in (0.5, 1.0, 3.0):
        rho, rho_dot, _ = hankel_derivatives(PowerLawCase(b, 0.0, 7.0), t)
        assert np.max(np.abs(rho - b**-0.5)) < 1e-12
        assert np.max(np.abs(rho_dot)) < 1e-10


def test_quadratic_residual():
    case = PowerLawCase(1.0, 2.0, 10.0)
    t = np.linspace(0.5, 2.0, 20)
    assert np.max(np.abs(rescaled_residual(case.profile, 10.0, t, hankel_derivatives(case, t)))) < 1e-8


@pytest.mark.parametrize("m, b, lam", [(1.0, 0.7, 3.0), (-1.0, 2.0, 50.0), (-4 / 3, 1.0, 5.0), (-3.0, 1.2, 4.0), (4.0, 0.3, 200.0)])
def test_exact_across_exponents(m, b, lam):
    case = PowerLawCase(b, m, lam)
    t = np.linspace(0.3, 3.0, 25)
    derivs = hankel_derivatives(case, t)
    scale = derivs[0] ** -3
    assert np.max(np.abs(rescaled_residual(case.profile, lam, t, derivs)) / scale) < 1e-8


def test_hankel_derivative_consistent_with_fd():
    case = PowerLawCase(1.0, 2.0, 10.0)
    h = 1e-5
    for t in (0.7, 1.4):
        rp, rm = rho_powerlaw_hankel(case, t + h).rho, rho_powerlaw_hankel(case, t - h).rho
        assert rho_powerlaw_hankel(case, t).rho_dot == pytest.approx((rp - rm) / (2 * h), rel=1e-8)


def test_hankel_tends_to_leading_term():
    t = np.linspace(0.5, 2.0, 7)
    errs = []
    for lam in (1e2, 1e4):
        rho = hankel_derivatives(PowerLawCase(1.0, 2.0, lam), t)[0]
        errs.append(np.max(np.abs(rho - leading_derivatives(PowerLaw(1.0, 2.0), t)[0])))
    assert errs[1] < 0.02 * errs[0]


def test_hankel_errors():
    with pytest.raises(DomainError):
        rho_powerlaw_hankel(PowerLawCase(1.0, 2.0, 1.0), 0.0)
    with pytest.raises(DomainError, match="radicand"):
        rho_powerlaw_hankel(PowerLawCase(1.0, 2.0, 1.0, gamma2=-1), 1.0)
    with pytest.raises(DomainError):
        PowerLawCase(1.0, -2.0, 1.0)
    with pytest.raises(DomainError):
        rho_powerlaw_hankel(PowerLawCase(1.0, 2.0, 1.0, gamma1=-1), 1.0)


# -- finite-sum solution


def test_lewis_index_one_explicit_form():
    b, lam = 1.0, 5.0
    case = PolynomialCase(1, b, lam)
    assert case.m == pytest.approx(-4 / 3)
    for t in (0.5, 1.0, 2.0):
        explicit = b**-0.5 * t ** (1 / 3) * math.sqrt(1 + t ** (-2 / 3) / (9 * b * b * lam))
        assert rho_powerlaw_polynomial(case, t).rho == pytest.approx(explicit, rel=1e-14)


def test_lewis_index_one_residual():
    case = PolynomialCase(1, 1.0, 5.0)
    t = np.array([0.5, 1.0, 2.0])
    assert np.max(np.abs(rescaled_residual(case.profile, 5.0, t, polynomial_derivatives(case, t)))) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 5])
def test_higher_lewis_indices_residual(n):
    case = PolynomialCase(n, 1.3, 5.0)
    t = np.linspace(0.3, 3.0, 30)
    assert np.max(np.abs(rescaled_residual(case.profile, 5.0, t, polynomial_derivatives(case, t)))) < 1e-10


def test_series_length():
    assert len(PolynomialCase(4, 1.0, 1.0).series_coefficients()) == 5


def test_polynomial_large_lambda_limit():
    case = PolynomialCase(2, 1.5, 1e16)
    for t in (0.5, 2.0):
        assert rho_powerlaw_polynomial(case, t).rho == pytest.approx(eval_profile(case.profile, t) ** -0.25, rel=1e-7)


def test_polynomial_and_hankel_both_solve():
    t = 1.0
    poly = PolynomialCase(1, 1.0, 5.0)
    hank = PowerLawCase(1.0, poly.m, 5.0)
    for derivs in (polynomial_derivatives(poly, t), hankel_derivatives(hank, t)):
        assert abs(rescaled_residual(poly.profile, 5.0, t, derivs)) < 1e-8


def test_polynomial_case_validation():
    for n in (0, -1, 1.5):
        with pytest.raises(DomainError):
            PolynomialCase(n, 1.0, 1.0)
    with pytest.raises(DomainError):
        PolynomialCase(1, 1.0, 1.0, gamma2=-1)
    with pytest.raises(DomainError):
        rho_powerlaw_polynomial(PolynomialCase(1, 1.0, 1.0), -1.0)


# -- leading term


def test_leading_constant_sixteen():
    assert rho_adiabatic_leading(Constant(16.0), 0.3).rho == 0.5


def test_leading_power_law():
    state = rho_adiabatic_leading(PowerLaw(1.0, 2.0), 2.0)
    assert state.rho == pytest.approx(4**-0.25, rel=1e-15)
    assert abs(state.rho - 0.70711) < 1e-5


def test_leading_derivative_formula():
    h = 1e-5
    t = 1.1
    r = lambda s: rho_adiabatic_leading(WIGGLE, s).rho
    assert rho_adiabatic_leading(WIGGLE, t).rho_dot == pytest.approx((r(t + h) - r(t - h)) / (2 * h), rel=1e-8)


def test_leading_residual_shrinks_like_inverse_lambda():
    t = np.linspace(0, 2 * math.pi, 101)
    derivs = leading_derivatives(WIGGLE, t)
    r2 = np.max(np.abs(rescaled_residual(WIGGLE, 1e2, t, derivs)))
    r4 = np.max(np.abs(rescaled_residual(WIGGLE, 1e4, t, derivs)))
    assert r4 / r2 < 0.02


def test_leading_standard_scaling():
    lam = 81.0
    a = rho_adiabatic_leading(WIGGLE, 0.4, lam, Convention.STANDARD)
    b = rho_adiabatic_leading(WIGGLE, 0.4)
    assert a.rho == pytest.approx(b.rho / 3)
    with pytest.raises(DomainError):
        rho_adiabatic_leading(WIGGLE, 0.4, None, Convention.STANDARD)


# -- closed-form geometric angle


def test_closed_angle_flat():
    assert geometric_angle_powerlaw(0.0, 2.0, 0.5, 9.0) == 0.0


def test_closed_angle_value():
    assert geometric_angle_powerlaw(2.0, 1.0, 1.0, 2.0) == pytest.approx(3 / 32, abs=1e-15)


@pytest.mark.parametrize("m, b", [(2.0, 1.0), (1.0, 0.5), (-1.0, 2.0)])
def test_closed_angle_matches_quadrature(m, b):
    path = adiabatic.leading_path(PowerLaw(b, m), 1.0, 2.0)
    assert phases.geometric_angle(path, 1.0, 2.0) == pytest.approx(geometric_angle_powerlaw(m, b, 1.0, 2.0), abs=1e-8)


def test_closed_angle_errors():
    with pytest.raises(DomainError):
        geometric_angle_powerlaw(-2.0, 1.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        geometric_angle_powerlaw(1.0, 1.0, 0.0, 2.0)


def test_hankel_angle_converges_to_closed_form():
    errs = []
    for lam in (1e2, 1e4):
        path = adiabatic.hankel_path(PowerLawCase(1.0, 2.0, lam), 1.0, 2.0)
        errs.append(abs(phases.geometric_angle(path, 1.0, 2.0) - 3 / 32))
    assert errs[1] < 0.02 * errs[0]


def test_standard_angle_is_rescaled():
    lam = 400.0
    case = PowerLawCase(1.0, 2.0, lam)
    g25 = phases.geometric_angle(adiabatic.hankel_path(case, 1.0, 2.0), 1.0, 2.0)
    g9 = phases.geometric_angle(adiabatic.hankel_path(case, 1.0, 2.0, Convention.STANDARD), 1.0, 2.0)
    assert g9 == pytest.approx(g25 / math.sqrt(lam), rel=1e-12)


# -- rescaled invariant


def test_rescaled_invariant_conserved():
    lam = 25.0
    traj = adiabatic.evolve_rescaled(WIGGLE, lam, OscState(0.0, 0.7, -0.2), 20.0, PinneyState(0.0, 1.1, 0.5), TIGHT)
    inv = traj.invariant(traj.dense.ts)
    assert np.max(np.abs(inv / inv[0] - 1)) < 100 * TIGHT.rel_tol


def test_rescaled_trajectory_solves_rescaled_pinney():
    lam = 25.0
    traj = adiabatic.evolve_rescaled(WIGGLE, lam, OscState(0.0, 0.7, -0.2), 5.0, settings=TIGHT)
    alone = solve_pinney(WIGGLE, lam, traj.pinney.state(0.0), 5.0, Convention.RESCALED, TIGHT)
    t = np.linspace(0, 5, 11)
    assert np.allclose(traj.dense(t)[:, 2], alone.dense(t)[:, 0], rtol=1e-8)


def test_standard_variables_preserve_invariant():
    lam = 16.0
    osc, pin = OscState(0.3, 0.4, -1.1), PinneyState(0.3, 1.2, 0.7)
    q_o, p_o = adiabatic.to_standard_variables(osc, pin, lam)
    assert ermakov_invariant(q_o, p_o) == pytest.approx(adiabatic.rescaled_invariant(osc, pin, lam), rel=1e-14)
    back = convert_pinney_state(p_o, lam, Convention.STANDARD, Convention.RESCALED)
    assert back.rho == pytest.approx(pin.rho, rel=1e-15)


def test_rescaled_angle_rate():
    lam = 9.0
    traj = adiabatic.evolve_rescaled(WIGGLE, lam, OscState(0.0, 1.0, 0.0), 6.0, settings=TIGHT)
    h = 1e-4
    t = 2.3
    th = traj.unwrapped_angle([t - h, t + h])
    rho = traj.pinney.state(t).rho
    assert (th[1] - th[0]) / (2 * h) == pytest.approx(math.sqrt(lam) / rho**2, rel=1e-7)
