"""Exception types raised across the package.

Each class marks a distinct failure mode so callers can react to, e.g., an
eigenvalue crossing differently from a plain dimension mismatch.
"""

__all__ = [
    "AdlindError",
    "DimensionMismatchError",
    "HorizonError",
    "DefectiveDecompositionError",
    "CrossingError",
    "TrackingError",
    "GapDegenerateError",
    "DegenerateSpectrumError",
    "BlockStructureError",
    "CoefficientError",
    "IntegrationError",
    "InvalidStateError",
    "LogDomainError",
    "ConfigError",
]


class AdlindError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(AdlindError, ValueError):
    """Shapes of operators, vectors, or bases do not agree."""


class HorizonError(AdlindError, ValueError):
    """A time argument lies outside the model's horizon [0, tau]."""


class DefectiveDecompositionError(AdlindError):
    """Generalized-eigenvector chain construction failed for a cluster.

    Raised when the rank decisions inside an eigenvalue cluster are
    ambiguous at the requested clustering tolerance. The message names the
    offending cluster.
    """


class CrossingError(AdlindError):
    """Two tracked eigenvalue paths collide at some point of the grid."""


class TrackingError(AdlindError):
    """Block matching between neighbouring grid points is ambiguous."""


class GapDegenerateError(AdlindError):
    """An eigenvalue gap vanishes on the grid, so 1/gap terms diverge."""


class DegenerateSpectrumError(AdlindError):
    """Closed-form spectrum requested at a degenerate parameter point."""


class BlockStructureError(AdlindError):
    """Operation requires a different Jordan block structure.

    For instance the rank-1 propagator is only defined when every block is
    one-dimensional.
    """


class CoefficientError(AdlindError):
    """Intra-block coefficient matrices violate their defining constraints."""


class IntegrationError(AdlindError):
    """Step-doubling control failed to reach the target accuracy."""


class InvalidStateError(AdlindError, ValueError):
    """Input is not a valid density matrix within tolerance."""


class LogDomainError(AdlindError, ValueError):
    """Matrix logarithm requested for a rank-deficient state."""


class ConfigError(AdlindError, ValueError):
    """Experiment configuration file is malformed or inconsistent."""
