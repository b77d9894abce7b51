"""Exception hierarchy shared by all shiftscope modules.

Every error carries a distinct process exit code so the CLI can map
failures onto diagnosable statuses (see ``cli.py``).
"""


class ShiftScopeError(Exception):
    """Base class for all shiftscope errors."""

    exit_code = 1


# --- ingestion / file formats ---------------------------------------------

class ParseError(ShiftScopeError):
    """Input file is structurally malformed."""

    exit_code = 3


class DuplicateId(ShiftScopeError):
    """Two manifest records share the same id."""

    exit_code = 4


class AttributeSchemaMismatch(ShiftScopeError):
    """Attribute maps do not use one consistent key set across the manifest."""

    exit_code = 5


class BadMagic(ShiftScopeError):
    """Embedding file does not start with the DSEM magic bytes."""

    exit_code = 6


class CountMismatch(ShiftScopeError):
    """Embedding row count disagrees with the expected instance count."""

    exit_code = 7


class NonFiniteValue(ShiftScopeError):
    """A vector contains NaN or infinity."""

    exit_code = 8


class RowCountMismatch(ShiftScopeError):
    """A latent space's row count differs from the manifest length."""

    exit_code = 9


# --- model / numerics -------------------------------------------------------

class DimensionMismatch(ShiftScopeError):
    """Vector or matrix dimensions are incompatible."""

    exit_code = 10


class SplitEmpty(ShiftScopeError):
    """Train or test split is empty where both are required."""

    exit_code = 11


class EmptySplit(SplitEmpty):
    """Alias used by loss/gradient helpers operating on raw batches."""


class NonPositiveRatio(ShiftScopeError):
    """Density ratios must be strictly positive."""

    exit_code = 12


class DivergedLoss(ShiftScopeError):
    """Training encountered a non-finite loss or parameter."""

    exit_code = 13


class NotFitted(ShiftScopeError):
    """Estimator used before ``fit``."""

    exit_code = 14


# --- scoring / analysis -----------------------------------------------------

class TooFewPoints(ShiftScopeError):
    """Operation needs more points than were provided."""

    exit_code = 15


class MissingModel(ShiftScopeError):
    """Scoring method requires a trained ratio model."""

    exit_code = 16


class UnknownSpace(ShiftScopeError):
    """Named latent space does not exist in the store."""

    exit_code = 17


class UnknownInstance(ShiftScopeError):
    """Instance id or index does not resolve."""

    exit_code = 18


class UnknownCluster(ShiftScopeError):
    """Cluster id does not exist in the assignment."""

    exit_code = 19


class ScoreCoverageGap(ShiftScopeError):
    """Score table does not cover every requested instance."""

    exit_code = 20


class OutOfRange(ShiftScopeError):
    """Value outside its documented domain (e.g. suspicion outside [0,1])."""

    exit_code = 21


class DegenerateVariance(ShiftScopeError):
    """All points identical; no principal direction exists."""

    exit_code = 22


class CoverageGap(ShiftScopeError):
    """External projection does not cover the test split exactly."""

    exit_code = 23


class NoAttributes(ShiftScopeError):
    """Benchmark generation requires attribute labels on every instance."""

    exit_code = 24


class SingleClass(ShiftScopeError):
    """AUROC needs both positive and negative labels."""

    exit_code = 25


# --- store / service --------------------------------------------------------

class MissingArtifact(ShiftScopeError):
    """A required precomputed artifact (scores, clusters, ...) is absent."""

    exit_code = 26


class StoreLocked(ShiftScopeError):
    """Another process holds the store directory's write lock."""

    exit_code = 27


class PortUnavailable(ShiftScopeError):
    """Requested service port could not be bound."""

    exit_code = 28
