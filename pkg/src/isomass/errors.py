"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes):

* ``UsageError`` subclasses: the request itself is out of range or malformed.
* ``NumericalError`` subclasses: a computation ran and failed a diagnostic.
"""


class IsomassError(Exception):
    """Base class for every error raised by this package."""


class UsageError(IsomassError, ValueError):
    """Arguments outside the documented domain."""


class DomainError(UsageError):
    pass


class ArgumentError(UsageError):
    pass


class NoAdmissiblePath(DomainError):
    """No mass-constant phase path terminates at the requested abscissa."""


class NotAsymptoticallyFlat(UsageError):
    pass


class ProfileFormatError(UsageError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(IsomassError, ArithmeticError):
    """A numerical diagnostic failed."""


class EvaluationError(NumericalError):
    def __init__(self, message, abscissa=None):
        self.abscissa = abscissa
        if abscissa is not None:
            message = f"{message} (at x={abscissa!r})"
        super().__init__(message)


class SingularityMismatch(NumericalError):
    pass


class EndpointNotRoot(NumericalError):
    pass


class WrongSignedSlope(NumericalError):
    pass


class DerivativeError(NumericalError):
    pass


class InvalidPath(NumericalError):
    pass


class FlowBreakdown(NumericalError):
    def __init__(self, message, volume=None):
        self.volume = volume
        if volume is not None:
            message = f"{message} (at V={volume!r})"
        super().__init__(message)


class ConsistencyError(NumericalError):
    pass


class MonotonicityError(NumericalError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class QuadratureWarning(UserWarning):
    """Coarse-grid comparison disagrees beyond the configured tolerance."""
