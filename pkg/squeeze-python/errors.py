"""
Failure modes of the squeezelight engine and the CLI exit codes they map to.
"""


class SqueezeError(Exception):
    """Root of every error raised by the engine."""


class ConfigError(SqueezeError, ValueError):
    """Invalid bath, profile, grid or scenario configuration."""


class PhysicalityError(ConfigError):
    """X-state parameters that do not describe a positive semidefinite matrix."""


class DomainError(SqueezeError, ValueError):
    """An argument outside the domain of an operation (negative time, bad attenuation)."""


class NumericalError(SqueezeError, ArithmeticError):
    """A numerical routine failed to deliver a trustworthy answer."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class CriticalTimeError(NumericalError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvariantViolation(NumericalError):
    """A density-matrix invariant broke beyond round-off."""


class UndefinedRateError(NumericalError):
    """Amplification rate requested for a state with no initial discord."""


EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

EXIT_CODES = {
    ConfigError: EXIT_CONFIG,
    DomainError: EXIT_CONFIG,
    NumericalError: EXIT_NUMERICAL,
    OSError: EXIT_IO,
    SqueezeError: EXIT_GENERIC,
}


def exit_code_for(exc):
    """Most specific exit code for an exception, walking its MRO."""
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return EXIT_GENERIC
