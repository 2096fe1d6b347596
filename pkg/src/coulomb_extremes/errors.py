"""Exception hierarchy shared by all modules."""


class CoulombExtremesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CoulombExtremesError, ValueError):
    """An argument lies outside the domain where a function is defined."""


class EvaluationError(CoulombExtremesError):
    """A potential produced a non-finite value."""

    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class AmbiguousEdgeError(CoulombExtremesError):
    """V' changes sign more than once, so the inner edge is not unique."""


class BracketError(CoulombExtremesError):
    """No sign change was found inside the search interval."""


class DegenerateEdgeError(CoulombExtremesError):
    """An edge curvature is not positive (multi-critical regime)."""


class InadmissiblePotentialError(CoulombExtremesError):
    """The potential fails the confinement or monotonicity conditions."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class QuadratureError(CoulombExtremesError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SmallNError(CoulombExtremesError):
    """N is too small for the slowly varying scaling sequence to be defined."""
