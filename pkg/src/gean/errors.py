"""Exception types raised across the package."""


class GeanError(Exception):
    """Base class for all estimator errors."""


class OutOfRange(GeanError, ValueError):
    """An observed statistic has no preimage under the expectation curve."""


class Degenerate(GeanError, ArithmeticError):
    """A k(r) case constant hit a vanishing denominator."""


class Infeasible(GeanError):
    """No operating point satisfies the accuracy contract."""


class InvalidUpperBound(GeanError, ValueError):
    pass


class ProbeOverflow(GeanError):
    """The probe saw no empty slot before exhausting its persistence schedule."""


class Saturated(GeanError):
    """Every observed slot was busy, so the estimate is unbounded.

    ``diagnostics`` carries whatever the caller measured before giving up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
