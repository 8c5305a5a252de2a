"""Semantic exception hierarchy.

Public functions never raise bare ValueError for contract violations; they
raise one of these so callers (and the CLI exit-code mapping) can react to the
failing stage rather than parsing messages.
"""


class OballError(Exception):
    """Base error for the package."""


class ExpressionError(OballError, ValueError):
    """Orlicz expression cannot be parsed or is not admissible."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class NotConvexError(ExpressionError):
    """Expression contains a non-convex atom and generalized mode is off."""


class NonIntegrableError(OballError):
    """Integrand fails to decay; the tilt is outside the finite-mass region."""


class ToleranceNotMetError(OballError):
    """Adaptive quadrature exhausted its subdivision budget."""


class DomainError(OballError):
    """A Gibbs-measure computation was requested outside its finite domain."""


class BracketFailureError(OballError):
    """Scalar root bracketing failed within the search window."""


class NoSolutionError(OballError):
    """The two-parameter tilt system has no reachable solution.

    Carries the last in-domain iterate so callers can inspect how far the
    solver got before giving up.
    """

    def __init__(self, message: str, last_params=None, last_residual=None):
        super().__init__(message)
        self.last_params = last_params
        self.last_residual = last_residual


class BranchError(OballError):
    """Requested formula is outside its deviation branch (e.g. level <= typical)."""


class DegenerateError(OballError):
    """Covariance is numerically singular (statistics linearly dependent)."""


class DegenerateEstimateError(OballError):
    """Too few Monte Carlo samples reached the rare region to form an estimate."""
