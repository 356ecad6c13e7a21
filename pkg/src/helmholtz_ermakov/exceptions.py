"""Exception hierarchy shared by the numerical modules and the CLI."""


class HelmholtzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HelmholtzError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NumericalError(HelmholtzError):
    """A computation failed numerically.

    ``module`` names the component that failed and ``t`` carries the
    abscissa of the failure when one is meaningful; the CLI prints both.
    """

    module = "numerics"

    def __init__(self, message, t=None):
        self.t = t
        self.reason = message
        if t is not None:
            message = f"{message} (t={t!r})"
        super().__init__(message)


class IntegrationError(NumericalError):
    module = "ode"


class PinneyError(NumericalError):
    module = "ermakov"


class ClosureError(NumericalError):
    """A trajectory expected to be periodic failed to close on itself."""

    module = "phases"

    def __init__(self, message, defect, t=None):
        self.defect = defect
        super().__init__(f"{message}: closure defect {defect:.3e}", t)


class SpectrumError(NumericalError):
    module = "spectrum"


class QuadratureError(NumericalError):
    module = "quadrature"
