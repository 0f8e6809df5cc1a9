"""Exception hierarchy for the column modeling-parameter toolkit.

Every error raised by this package derives from :class:`ColmpError` so
callers (CLI, HTTP service) can map failures to exit codes / status codes
in one place.
"""

from __future__ import annotations


class ColmpError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# Domain-type validation
# ---------------------------------------------------------------------------

class InvalidFeatures(ColmpError):
    """A feature set violates its invariants (non-finite or out of range)."""


class NonFiniteInput(InvalidFeatures):
    """An input value is NaN or infinite."""


class InvalidParams(ColmpError):
    """Modeling parameters violate a >= 0 or b >= a."""


# ---------------------------------------------------------------------------
# Dataset ingestion
# ---------------------------------------------------------------------------

class DatasetError(ColmpError):
    """Base class for CSV ingestion and dataset validation failures."""

    def __init__(self, message: str, row: int | None = None,
                 column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingColumn(DatasetError):
    """Header row does not match the expected schema."""


class MalformedRow(DatasetError):
    """A data row has the wrong number of cells."""


class NonNumericCell(DatasetError):
    """A numeric cell failed to parse as a finite number."""


class NegativeRatio(DatasetError):
    """A nonnegative (or strictly positive) cell is out of range."""


class InvalidCategory(DatasetError):
    """A categorical cell holds an unknown token."""


class DuplicateId(DatasetError):
    """Two rows share the same id."""


class BLessThanA(DatasetError):
    """A row reports modeling parameter b smaller than a."""


class InsufficientRows(ColmpError):
    """Not enough rows for the requested computation."""


# ---------------------------------------------------------------------------
# Linear algebra / training
# ---------------------------------------------------------------------------

class DimensionMismatch(ColmpError):
    """Matrix/vector dimensions are inconsistent."""


class SingularMatrix(ColmpError):
    """Normal equations are rank deficient (not SPD)."""


class ZeroResidualVariance(ColmpError):
    """Perfect fit: inference statistics are undefined."""


class KTooLarge(ColmpError):
    """Requested more features than available."""


class EmptyGrid(ColmpError):
    """Regularization grid is empty or contains negative values."""


class KOutOfRange(ColmpError):
    """Cross-validation fold count outside [2, n]."""


class FactorizationFailed(ColmpError):
    """Cholesky factorization failed even after jitter escalation."""


class DivergenceDetected(ColmpError):
    """Training loss became non-finite."""


class SingleClassData(ColmpError):
    """Classification training data contains fewer than two classes."""


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class LengthMismatch(ColmpError):
    """Paired vectors have different lengths."""


class ZeroVariance(ColmpError):
    """Target vector is constant: R^2 is undefined."""


class ZeroRange(ColmpError):
    """A feature has zero range in the dataset statistics."""

    def __init__(self, message: str, feature: str | None = None):
        super().__init__(message)
        self.feature = feature


class EmptyBin(ColmpError):
    """A bin predicate selected no rows."""


# ---------------------------------------------------------------------------
# Artifacts / service
# ---------------------------------------------------------------------------

class UnsupportedVersion(ColmpError):
    """Artifact format_version is not supported."""


class CorruptPayload(ColmpError):
    """Artifact JSON is malformed or missing required keys."""


class ArityMismatch(ColmpError):
    """Artifact payload arrays have inconsistent shapes."""


class UnknownModel(ColmpError):
    """Requested model name is not in the registry."""
