"""Exception types raised across ttlab."""


class TTLabError(Exception):
    """Base class for all library errors."""


class MetricValidationError(TTLabError, ValueError):
    """A distance matrix violates one of the metric axioms.

    ``indices`` holds the offending index tuple (a pair or a triple).
    """

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class ParameterError(TTLabError, ValueError):
    pass


class CoverageError(TTLabError, ValueError):
    """A relation does not cover both sides of a correspondence."""


class SizeError(TTLabError, ValueError):
    """Exact enumeration requested above the configured point cap."""


class SpecError(TTLabError, ValueError):
    """A generator spec is malformed (cycle, disconnection, non-convexity...)."""


class DomainError(TTLabError, ValueError):
    pass


class InjectivityError(TTLabError):
    """Two distinct sources have identical travel time rows."""

    def __init__(self, p, q):
        super().__init__(f"travel time map is not injective: rows {p} and {q} coincide")
        self.pair = (p, q)


class ProfileError(TTLabError, ValueError):
    pass


class QuadratureError(TTLabError, ArithmeticError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class PreconditionError(TTLabError):
    """A theorem precondition failed; the failing check report is attached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
