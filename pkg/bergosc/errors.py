"""
Exceptions and warnings raised by bergosc.

Blocking conditions raise a subclass of BergoscError. Advisory conditions are
issued through ``warnings.warn`` with a subclass of BergoscWarning so callers can
filter them the usual way.
"""


class BergoscError(Exception):
    """Base class of every error raised by the package."""


class ConfigError(BergoscError, ValueError):
    """Invalid configuration value (quadrature settings, ladders, CLI flags)."""


class BadParameters(BergoscError, ValueError):
    """Parameters outside the domain of an operation."""


class ExpressionError(BergoscError, ValueError):
    """A symbol expression could not be parsed."""


class PointOutsideBox(BergoscError):
    pass


class OrderViolation(BergoscError):
    pass


class AreaRatioViolation(BergoscError):
    pass


class RootFindFailure(BergoscError):
    pass


class RefinementUnstable(BergoscError):
    """Doubling the sampling grid moved a supremum by more than the gate."""

    def __init__(self, msg, coarse=None, fine=None):
        super().__init__(msg)
        self.coarse = coarse
        self.fine = fine


class TailBoundExceeded(BergoscError):
    pass


class NoConvergence(BergoscError):
    """The QR iteration hit its cap; ``partial`` holds the converged eigenvalues."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class CurveThroughZero(BergoscError):
    pass


class UnderResolved(BergoscError):
    pass


class NotFredholm(BergoscError):
    pass


class Unstable(BergoscError):
    def __init__(self, msg, indices=None):
        super().__init__(msg)
        self.indices = indices


class RefusesIfChecksRed(BergoscError):
    def __init__(self, msg, failed=None):
        super().__init__(msg)
        self.failed = failed or []


class BergoscWarning(UserWarning):
    pass


class ToleranceNotReached(BergoscWarning):
    pass


class TruncationWarning(BergoscWarning):
    pass


class PreconditionWarning(BergoscWarning):
    pass
