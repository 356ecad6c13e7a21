"""Helmholtz equation as a time-dependent oscillator: Ermakov invariant,
Milne-Pinney solutions, classical angles, quantum phases, Dirichlet
spectra and adiabatic power-law solutions."""

from .adiabatic import (
    PolynomialCase,
    PowerLawCase,
    evolve_rescaled,
    geometric_angle_powerlaw,
    rescaled_invariant,
    rho_adiabatic_leading,
    rho_powerlaw_hankel,
    rho_powerlaw_polynomial,
)
from .ermakov import (
    AlgebraCoefficients,
    Convention,
    OscState,
    PinneyState,
    algebra_coefficients,
    angle_variable,
    canonical_qp,
    ermakov_invariant,
    evolve_coupled,
    evolve_oscillator,
    generating_function,
    hamiltonian_value,
    mu_rates,
    pinney_from_linear,
    solve_pinney,
)
from .exceptions import (
    ClosureError,
    DomainError,
    HelmholtzError,
    IntegrationError,
    NumericalError,
    PinneyError,
    QuadratureError,
    SpectrumError,
)
from .ode import DenseTrajectory, IntegrationSettings, integrate
from .phases import (
    AnalyticRho,
    angle_report,
    berry_phase,
    dynamical_angle,
    geometric_angle,
    hannay_angle,
    lewis_phase,
    quantum_report,
)
from .profiles import (
    Constant,
    Periodic,
    PowerLaw,
    ProfileParseError,
    Tabulated,
    eval_profile,
    parse_profile,
    render_profile,
)
from .quantum import Eigenfunction, Superposition, eigenfunction_value, inner_product
from .specfun import bessel_jy, hankel_product
from .spectrum import SpectrumProblem, solve_dirichlet_eigenvalues

__all__ = [name for name in dir() if not name.startswith("_")]
