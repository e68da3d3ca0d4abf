"""Exception taxonomy shared by every subsystem.

Two broad categories matter for the CLI exit codes: input/validation
problems (exit 2) and numerical failures (exit 3).
"""


class EpifrontError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(EpifrontError):
    """Bad configuration, parameters, or input data (CLI exit code 2)."""


class NumericalError(EpifrontError):
    """A solver failed to converge or produced unusable output (CLI exit code 3)."""


# -- model ---------------------------------------------------------------

class NonPositiveDerivative(ValidationError):
    """H' or G' is not strictly positive somewhere on the sampled range."""


class NoWitness(ValidationError):
    """No saturation witness z with G(H(z)/a) < b*z was found up to z_max."""


class BracketingFailure(NumericalError):
    """The equilibrium residual does not change sign on the search range."""


class InitialDataError(ValidationError):
    """Initial profiles violate the admissibility conditions for the fixed end."""


# -- spectral ------------------------------------------------------------

class NonConvergence(NumericalError):
    """Inverse iteration failed to settle on the target eigenvalue."""


class NotSupercritical(ValidationError):
    """Operation requires R0 > 1 but the model is subcritical."""


# -- elliptic ------------------------------------------------------------

class SearchExhausted(NumericalError):
    """Doubling search for the ceiling constants ran past its cap."""


class Subcritical(ValidationError):
    """Steady problem posed on an interval with a nonnegative principal eigenvalue."""


class OrderingViolation(NumericalError):
    """Monotone iteration lost the lower <= upper ordering."""


# -- stefan --------------------------------------------------------------

class CflViolation(NumericalError):
    """Requested time step exceeds the advection CFL bound."""

    def __init__(self, message: str, dt_max: float = 0.0):
        super().__init__(message)
        self.dt_max = dt_max


class BlowUp(NumericalError):
    """Fields exceeded the instability guard; the scheme has gone unstable."""


# -- dichotomy -----------------------------------------------------------

class NotSubcritical(ValidationError):
    """Operation requires R0 <= 1 but the model is supercritical."""


class InsufficientData(ValidationError):
    """Too few timeline samples in the fitting window."""


# -- criteria ------------------------------------------------------------

class InconsistentMonotonicity(NumericalError):
    """Probe outcomes violate the monotone ordering even after a T_max retry."""


# -- harness -------------------------------------------------------------

class ParseError(ValidationError):
    """A persisted file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
