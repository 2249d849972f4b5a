"""Exception hierarchy shared by every orbita module."""


class OrbitaError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class NotAMorphismError(OrbitaError):
    """The forms share a common zero, so they do not define a morphism."""


class DegreeHypothesisError(OrbitaError):
    """The map has degree < 2."""


class BaseLocusError(OrbitaError):
    """All forms vanish at the point (only possible for unverified P^n, n >= 2)."""


class BudgetExceededError(OrbitaError):
    """A coordinate, candidate or iteration budget was exhausted."""


class CandidateSetTooLarge(BudgetExceededError):
    pass


class MalformedChainError(OrbitaError):
    """A chain violates f(x_{n+1}) = x_n."""


class PreconditionError(OrbitaError):
    pass


class NotOnCurveError(OrbitaError):
    pass


class TorsionPointError(OrbitaError):
    """A point that must be of infinite order turned out to be torsion."""
