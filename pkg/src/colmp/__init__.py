"""Modeling parameters a/b and failure-mode prediction for RC columns."""

from .closed_form import (
    ClassScores,
    EstimatorFamily,
    FamilyEstimate,
    classify_fixed,
    estimate,
    estimate_gm,
    estimate_mlr_fixed,
    estimate_prm_fixed,
    estimate_rlr_fixed,
)
from .dataset import CSV_HEADER, dataset_stats, dataset_to_csv, parse_dataset
from .errors import ColmpError
from .fixtures import generate_fixture
from .types import (
    FEATURE_NAMES,
    BSource,
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    DatasetStats,
    FailureMode,
    ModelingParams,
    SectionShape,
    clamp_params,
)

__version__ = "0.1.0"

__all__ = [
    "BSource",
    "CSV_HEADER",
    "ClassScores",
    "ColmpError",
    "ColumnFeatures",
    "ColumnRecord",
    "Dataset",
    "DatasetStats",
    "EstimatorFamily",
    "FailureMode",
    "FamilyEstimate",
    "FEATURE_NAMES",
    "ModelingParams",
    "SectionShape",
    "clamp_params",
    "classify_fixed",
    "dataset_stats",
    "dataset_to_csv",
    "estimate",
    "estimate_gm",
    "estimate_mlr_fixed",
    "estimate_prm_fixed",
    "estimate_rlr_fixed",
    "generate_fixture",
    "parse_dataset",
]
