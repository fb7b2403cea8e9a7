"""Error types raised by the solvers.

Every failure mode that a caller can trigger with bad-but-well-formed input
gets its own class so the CLI can report the name verbatim and map it to an
exit code. Programming errors (wrong types, non-finite entries) raise plain
ValueError/TypeError instead.
"""


class LinnetError(Exception):
    """Base class for all solver-level failures."""


class DimMismatch(LinnetError):
    """Operands have incompatible shapes."""


class ZeroMatrix(LinnetError):
    """Operation is undefined for an all-zero matrix."""


class BadAlpha(LinnetError):
    """Regularization parameter is missing, non-positive, or otherwise unusable."""


class NotSymmetric(LinnetError):
    """Matrix is not symmetric within tolerance."""


class NotPsd(LinnetError):
    """Matrix has an eigenvalue below the positive-semidefinite tolerance."""


class SingularL(LinnetError):
    """Stabilizer matrix is numerically singular."""


class SingularShift(LinnetError):
    """Shifted matrix a + alpha*shift is numerically singular."""


class BadEpsilon(LinnetError):
    """Accuracy parameter outside (0, 1]."""


class BadExponent(LinnetError):
    """Noise-power exponent must exceed 1."""


class ZeroNoise(LinnetError):
    """Noise-driven rule called with zero combined noise."""


class DeltaTooSmall(LinnetError):
    """Target discrepancy is at or below the minimal attainable residual."""


class DeltaTooLarge(LinnetError):
    """Target discrepancy is at or above the norm of the data."""


class NoSignChange(LinnetError):
    """Discrepancy equation has no root inside the search bracket."""


class NoConvergence(LinnetError):
    """Iterative search exhausted its step budget."""


class NeverTriggered(LinnetError):
    """Stopping rule was not satisfied anywhere along the recorded trace."""


class DegenerateThreshold(LinnetError):
    """Stopping threshold is identically zero, so the rule cannot trigger."""


class DivergenceDetected(LinnetError):
    """Gradient iteration residual blew up instead of decreasing."""


class ParseError(LinnetError):
    """A matrix or spec file could not be parsed."""
