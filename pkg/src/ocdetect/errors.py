"""Exception hierarchy shared by all ocdetect modules."""


class OcdError(Exception):
    """Base class for all errors raised by ocdetect."""


class ShapeError(OcdError, ValueError):
    """Array arguments have inconsistent or unsupported shapes."""


class ParameterError(OcdError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class ConfigError(OcdError, ValueError):
    """A simulation or system configuration is invalid."""


class DegenerateError(OcdError, ArithmeticError):
    """Zero channel column or zero gain where a division is required."""


class SolverError(OcdError, ArithmeticError):
    """A linear solve failed (matrix numerically singular)."""


class RangeError(OcdError, OverflowError):
    """A fixed-point value does not fit its format."""


class TrialError(OcdError, RuntimeError):
    """A Monte-Carlo trial failed; the message names detector, SNR and trial."""
