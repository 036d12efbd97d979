"""Exception hierarchy shared by all modules."""


class GclError(Exception):
    """Base class for library errors."""


class OddDegreeSum(GclError, ValueError):
    pass


class InsufficientDegreeTwoMass(GclError, ValueError):
    pass


class NotCritical(GclError, ValueError):
    pass


class NotSupercritical(GclError, ValueError):
    pass


class DomainError(GclError, ValueError):
    pass


class BracketFailure(GclError, RuntimeError):
    """No sign change of H located; usually a truncation or tolerance problem."""


class BetaZero(GclError, ValueError):
    pass


class MaxAttemptsExceeded(GclError, RuntimeError):
    pass


class ModeMismatch(GclError, ValueError):
    pass


class UnitMismatch(GclError, ValueError):
    pass
