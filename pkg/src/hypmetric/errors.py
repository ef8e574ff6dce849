"""Exception hierarchy shared by every module in the package."""


class HypMetricError(Exception):
    """Base class for all package errors."""


class InvalidReal(HypMetricError, ValueError):
    """A coordinate was NaN or infinite."""


class HypOverflow(HypMetricError, OverflowError):
    """An arithmetic result left the finite doubles."""


class ZeroDivisorError(HypMetricError, ZeroDivisionError):
    """Inversion of an element lying on a zero-divisor line."""


class EmptySet(HypMetricError, ValueError):
    pass


class InvalidRadius(HypMetricError, ValueError):
    """A ball radius outside the positive cone."""


class InvalidInterval(HypMetricError, ValueError):
    pass


class DegeneratePair(HypMetricError, ValueError):
    """A sample pair at zero distance in some component."""


class NotAContraction(HypMetricError, ValueError):
    pass


class NoConvergence(HypMetricError, ArithmeticError):
    """Iteration budget exhausted. The partial report is kept on ``report``."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ScheduleViolated(HypMetricError, ValueError):
    pass


class PowerFixedPointMismatch(HypMetricError, ArithmeticError):
    pass


class NotContractive(HypMetricError, ValueError):
    pass


class NotSelfMap(HypMetricError, ValueError):
    pass


class GridTooCoarse(HypMetricError, ArithmeticError):
    pass


class DomainMismatch(HypMetricError, ValueError):
    pass


class NotFound(HypMetricError, LookupError):
    pass
