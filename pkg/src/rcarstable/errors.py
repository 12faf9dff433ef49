"""Exception hierarchy shared by every module in the package."""


class RcarError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(RcarError, ValueError):
    """An argument falls outside the domain an operation accepts."""


class SymmetryHypothesisError(RcarError):
    """The innovation law is not symmetric, so no limit scale is predicted.

    Raised by :func:`rcarstable.lepage.predict_limit_law`; skewed limits
    are only estimated from data.
    """


class TruncationError(RcarError):
    """The LePage truncation depth is too small for the requested tolerance."""


class NumericToleranceError(RcarError):
    """Numerical quadrature did not reach the requested accuracy.

    Attributes
    ----------
    diagnostics : dict
        Point of evaluation, estimated error, and integration segments.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DegenerateEcfError(RcarError):
    """The empirical characteristic function left the open band (0, 1)."""
