"""Domain types for reinforced concrete column modeling parameters.

The core value objects are immutable dataclasses.  A column test is
described by six nondimensional ratios (:class:`ColumnFeatures`), its
section shape, optional measured plastic rotations a and b (radians), and
an optional observed failure mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    DuplicateId,
    InvalidFeatures,
    InvalidParams,
    NonFiniteInput,
)

# Canonical feature order, shared by the CSV schema, design matrices and
# model artifacts.
FEATURE_NAMES: tuple[str, ...] = (
    "a_over_d",
    "axial_ratio",
    "rho_l",
    "rho_t",
    "s_over_d",
    "vy_over_vo",
)


class SectionShape(Enum):
    """Column cross-section category."""

    RECTANGULAR = "R"
    CIRCULAR = "C"


class FailureMode(Enum):
    """Observed or predicted column failure mode."""

    FC = "FC"    # flexure critical
    FSC = "FSC"  # flexure-shear critical
    SC = "SC"    # shear critical


# Higher rank = more ductile.  Predicting a more ductile mode than observed
# is unconservative for safety assessment.
DUCTILITY_RANK: dict[FailureMode, int] = {
    FailureMode.FC: 2,
    FailureMode.FSC: 1,
    FailureMode.SC: 0,
}


class BSource(Enum):
    """Provenance of the measured axial-failure rotation b.

    B2 rows hold lower-bound rotations inferred from tests stopped before
    axial failure; they are flagged so reports can treat them separately.
    """

    B1_MEASURED = "B1"
    B2_GENERATED = "B2"
    NOT_AVAILABLE = "NA"


@dataclass(frozen=True)
class ColumnFeatures:
    """The six nondimensional input ratios of a column test.

    span_depth     shear span to effective depth, a/d (> 0)
    axial_ratio    axial load ratio P / (A_g * f'_c) (>= 0)
    rho_l          longitudinal reinforcement ratio (>= 0)
    rho_t          transverse reinforcement ratio A_v / (b_w * s) (>= 0)
    spacing_depth  hoop spacing to effective depth, s/d (> 0)
    shear_ratio    shear capacity ratio V_y / V_o (>= 0)
    """

    span_depth: float
    axial_ratio: float
    rho_l: float
    rho_t: float
    spacing_depth: float
    shear_ratio: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, float):
                object.__setattr__(self, f.name, float(v))
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise NonFiniteInput(f"{f.name} is not finite: {v!r}")
            if v < 0.0:
                raise InvalidFeatures(f"{f.name} must be >= 0, got {v!r}")
        if self.span_depth <= 0.0:
            raise InvalidFeatures("span_depth must be > 0")
        if self.spacing_depth <= 0.0:
            raise InvalidFeatures("spacing_depth must be > 0")

    def as_array(self) -> np.ndarray:
        """Feature values in canonical order (see FEATURE_NAMES)."""
        return np.array(
            [self.span_depth, self.axial_ratio, self.rho_l,
             self.rho_t, self.spacing_depth, self.shear_ratio],
            dtype=float,
        )

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ColumnFeatures":
        vals = [float(v) for v in values]
        if len(vals) != 6:
            raise InvalidFeatures(f"expected 6 feature values, got {len(vals)}")
        return cls(*vals)


@dataclass(frozen=True)
class ModelingParams:
    """Plastic rotations (radians) at the two backbone degradation points.

    a: incipient lateral-strength degradation; b: incipient axial failure.
    Invariants: a >= 0 and b >= a.
    """

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidParams(f"non-finite parameters: a={self.a}, b={self.b}")
        if self.a < 0.0:
            raise InvalidParams(f"a must be >= 0, got {self.a}")
        if self.b < self.a:
            raise InvalidParams(f"b ({self.b}) must be >= a ({self.a})")


def clamp_params(raw_a: float, raw_b: float) -> ModelingParams:
    """Clamp raw regression outputs to physical range: a >= 0, then b >= a."""
    a = max(raw_a, 0.0)
    b = max(raw_b, a)
    return ModelingParams(a=a, b=b)


@dataclass(frozen=True)
class ColumnRecord:
    """One experimental column test row."""

    id: str
    shape: SectionShape
    features: ColumnFeatures
    mp_a: Optional[float] = None
    mp_b: Optional[float] = None
    b_source: BSource = BSource.NOT_AVAILABLE
    mode: Optional[FailureMode] = None

    def __post_init__(self):
        if self.mp_a is not None and self.mp_b is not None:
            if self.mp_b < self.mp_a:
                raise InvalidParams(
                    f"record {self.id!r}: mp_b ({self.mp_b}) < mp_a ({self.mp_a})"
                )


@dataclass(frozen=True)
class DatasetStats:
    """Per-feature summary statistics over one shape's rows.

    Arrays follow FEATURE_NAMES order.  ``value_range`` is max - min; the
    population standard deviation ``std`` is carried for standardizing
    inputs to trained models.  Features with zero range are listed in
    ``zero_range_features`` because mean-separation distances divide by the
    range.
    """

    shape: SectionShape
    n: int
    mean: np.ndarray
    minimum: np.ndarray
    maximum: np.ndarray
    value_range: np.ndarray
    std: np.ndarray
    zero_range_features: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("mean", "minimum", "maximum", "value_range", "std"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


class Dataset:
    """An immutable, validated collection of column records.

    Row order is preserved.  Per-shape summary statistics are computed on
    first use and cached.
    """

    def __init__(self, records: Sequence[ColumnRecord]):
        recs = tuple(records)
        seen: set[str] = set()
        for r in recs:
            if r.id in seen:
                raise DuplicateId(f"duplicate id {r.id!r}")
            seen.add(r.id)
        self._records = recs
        self._stats_cache: dict[SectionShape, DatasetStats] = {}

    @property
    def records(self) -> tuple[ColumnRecord, ...]:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ColumnRecord]:
        return iter(self._records)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._records == other._records

    def __repr__(self) -> str:
        n_r = sum(1 for r in self if r.shape is SectionShape.RECTANGULAR)
        return f"Dataset({len(self)} records: {n_r} R, {len(self) - n_r} C)"

    def by_shape(self, shape: SectionShape) -> tuple[ColumnRecord, ...]:
        return tuple(r for r in self._records if r.shape is shape)

    def stats(self, shape: SectionShape) -> DatasetStats:
        if shape not in self._stats_cache:
            from .dataset import dataset_stats

            self._stats_cache[shape] = dataset_stats(self, shape)
        return self._stats_cache[shape]
