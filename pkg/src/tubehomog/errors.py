"""Exception hierarchy.

Validation problems derive from :class:`ValueError`; numerical failures
(a root hugging a pole, an eigensolver that misses its residual target)
derive from :class:`ArithmeticError` / :class:`RuntimeError` so callers can
tell the two apart.
"""


class TubeHomogError(Exception):
    """Base class for every error raised by this package."""


class InadmissibleLaw(TubeHomogError, ValueError):
    """Scaling law violates the standing assumptions (p or q infinite, ...)."""


class UncoveredRegime(TubeHomogError, ValueError):
    """Limit combination that no homogenized problem covers."""


class MissingQ(UncoveredRegime):
    """0 < D < inf but the limit Q was not supplied."""


class PoleProximity(TubeHomogError, ArithmeticError):
    """A root or evaluation point sits within the pole guard of (pi n / q)^2."""


class ResolutionTooCoarse(TubeHomogError, ValueError):
    """More eigenvalues requested than the grid can provide."""


class InsufficientBase(TubeHomogError, ValueError):
    """Base spectrum too short to answer the query exactly."""


class GeometryError(TubeHomogError, ValueError):
    """Direct-model geometry is inconsistent (eps, h, hole radius)."""


class ConvergenceFailure(TubeHomogError, RuntimeError):
    """Eigensolver did not reach the requested residual."""
