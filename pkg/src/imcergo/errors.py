"""Exception types raised by the library."""


class ImcergoError(Exception):
    """Base class for all library-specific errors."""


class ModelLoadError(ImcergoError):
    """A model document could not be turned into a valid transition model."""


class SchemaViolation(ModelLoadError):
    """The document does not match the model or gamble schema."""


class DuplicateStateLabels(ModelLoadError):
    """The state list contains a repeated label."""


class PmfMassError(ModelLoadError):
    """A probability mass function has negative mass or does not sum to one."""


class IncoherentIntervals(ModelLoadError):
    """Probability intervals admit no probability mass function at all."""


class DimensionMismatch(ImcergoError):
    """A gamble or pmf has the wrong length for the state space."""


class NotStronglyConnected(ImcergoError):
    """Eigenvalue estimation requires a strongly connected accessibility graph."""


class ClassNotClosed(ImcergoError):
    """The given state set can leak mass outside itself."""


class ClassNotCommunicating(ImcergoError):
    """The given state set is not a single communication class."""


class NoConvergence(ImcergoError):
    """An iteration hit its cap before reaching the requested tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class IntervalRowsPresent(ImcergoError):
    """Exact chain enumeration needs vertex rows; convert interval rows first."""


class CapExceeded(ImcergoError):
    """An enumeration would exceed the configured size cap."""
