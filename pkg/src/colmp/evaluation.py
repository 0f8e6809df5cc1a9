"""Goodness-of-fit and diagnostic reports.

Error convention throughout: error = experiment - estimate (radians), so a
negative error means the model overpredicted deformation capacity, which
is unconservative for safety assessment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    EmptyBin,
    InsufficientRows,
    LengthMismatch,
    ZeroRange,
    ZeroVariance,
)
from .linear import DesignMatrix, coefficient_pvalues, ols_fit, select_significant
from .types import (
    DUCTILITY_RANK,
    FEATURE_NAMES,
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    DatasetStats,
    FailureMode,
)

MODE_ORDER = (FailureMode.FC, FailureMode.FSC, FailureMode.SC)


@dataclass(frozen=True)
class FitMetrics:
    r2: float
    mse: float
    std_err: float
    n: int


def fit_metrics(estimated, actual) -> FitMetrics:
    """R^2, MSE and the population standard deviation of the errors.

    R^2 = 1 - SS_res / SS_tot with SS_tot centered on the evaluation
    subset's own mean; std_err uses ddof 0.
    """
    est = np.asarray(estimated, dtype=float)
    act = np.asarray(actual, dtype=float)
    if est.shape != act.shape or est.ndim != 1:
        raise LengthMismatch(f"shapes {est.shape} vs {act.shape}")
    if len(act) < 2:
        raise LengthMismatch("need at least two points")
    resid = act - est
    ss_res = float(resid @ resid)
    centered = act - act.mean()
    ss_tot = float(centered @ centered)
    if ss_tot == 0.0:
        raise ZeroVariance("actual values are constant; R^2 undefined")
    return FitMetrics(
        r2=1.0 - ss_res / ss_tot,
        mse=ss_res / len(act),
        std_err=float(resid.std()),
        n=len(act),
    )


def error_cdf(errors) -> tuple[tuple[float, float], ...]:
    """Empirical CDF points (error, fraction <= error), F(x_(i)) = i/n.

    Tied values collapse to a single point at the highest fraction; the
    last fraction is exactly 1.0.
    """
    err = np.sort(np.asarray(errors, dtype=float))
    n = len(err)
    if n == 0:
        raise LengthMismatch("need at least one error value")
    points = []
    for i, value in enumerate(err, start=1):
        if i == n or err[i] != value:
            points.append((float(value), i / n))
    return tuple(points)


def separation_param(f: ColumnFeatures, stats: DatasetStats) -> float:
    """Normalized distance of a column's inputs from the dataset mean.

    d_i = (value_i - mean_i) / range_i per feature;
    result = sqrt(sum d_i^2) / (0.5 * sqrt(6)).
    """
    if stats.zero_range_features:
        raise ZeroRange(
            f"feature(s) with zero range: "
            f"{', '.join(stats.zero_range_features)}",
            feature=stats.zero_range_features[0])
    d = (f.as_array() - stats.mean) / stats.value_range
    return float(np.sqrt(np.sum(d * d)) / (0.5 * np.sqrt(6.0)))


@dataclass(frozen=True)
class BoxStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    outliers: tuple[float, ...]


def box_stats(values) -> BoxStats:
    """Five-number summary with 1.5*IQR outlier fences.

    Quartiles interpolate linearly on the fractional index q*(n-1).
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise LengthMismatch("need at least one value")
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = tuple(float(x) for x in np.sort(v[(v < lo) | (v > hi)]))
    return BoxStats(
        minimum=float(v.min()), q1=float(q1), median=float(med),
        q3=float(q3), maximum=float(v.max()), outliers=outliers,
    )


@dataclass(frozen=True)
class BinSpec:
    """A named, total predicate over column records."""

    name: str
    predicate: Callable[[ColumnRecord], bool]


def default_bins() -> tuple[BinSpec, ...]:
    """Span-to-depth, axial-ratio and failure-mode bins for subset analysis."""
    return (
        BinSpec("a/d<3", lambda r: r.features.span_depth < 3.0),
        BinSpec("3<=a/d<=5",
                lambda r: 3.0 <= r.features.span_depth <= 5.0),
        BinSpec("a/d>5", lambda r: r.features.span_depth > 5.0),
        BinSpec("axial<0.1", lambda r: r.features.axial_ratio < 0.1),
        BinSpec("0.1<=axial<=0.3",
                lambda r: 0.1 <= r.features.axial_ratio <= 0.3),
        BinSpec("axial>0.3", lambda r: r.features.axial_ratio > 0.3),
        BinSpec("mode=FC", lambda r: r.mode is FailureMode.FC),
        BinSpec("mode=FSC", lambda r: r.mode is FailureMode.FSC),
        BinSpec("mode=SC", lambda r: r.mode is FailureMode.SC),
    )


@dataclass(frozen=True)
class BinReport:
    """Per-bin significance and paired whole-set vs bin-fit accuracy.

    ``r2_full``/``mse_full`` score a model calibrated on every row (with
    the bin's top-k features) evaluated on the bin; ``r2_bin``/``mse_bin``
    score a model calibrated on the bin itself.
    """

    name: str
    n: int
    top_features: tuple[str, ...]
    r2_full: float
    mse_full: float
    r2_bin: float
    mse_bin: float


def _rows_with_target(ds: Dataset, target: str) -> list[ColumnRecord]:
    if target not in ("a", "b"):
        raise ValueError(f"target must be 'a' or 'b', got {target!r}")
    key = "mp_a" if target == "a" else "mp_b"
    return [r for r in ds if getattr(r, key) is not None]


def _design(rows: Sequence[ColumnRecord]) -> DesignMatrix:
    values = np.array([r.features.as_array() for r in rows])
    return DesignMatrix.build(values, FEATURE_NAMES, add_intercept=True)


def bin_analysis(ds: Dataset, bins: Sequence[BinSpec], target: str,
                 k: int = 3) -> tuple[BinReport, ...]:
    """Feature significance and fit accuracy per data subset.

    For each bin: p-values over all six ratios on the bin's rows, top-k
    selection, then two OLS fits with those features (whole set vs bin
    only), both scored on the bin rows.
    """
    rows = _rows_with_target(ds, target)
    key = "mp_a" if target == "a" else "mp_b"
    y_all = np.array([getattr(r, key) for r in rows])
    X_all = _design(rows)

    reports = []
    for spec in bins:
        mask = np.array([spec.predicate(r) for r in rows])
        n_bin = int(mask.sum())
        if n_bin == 0:
            raise EmptyBin(f"bin {spec.name!r} selected no rows")
        if n_bin <= k + 2:
            raise InsufficientRows(
                f"bin {spec.name!r} has {n_bin} rows; need > {k + 2}")
        X_bin = X_all.take_rows(mask)
        y_bin = y_all[mask]

        report = coefficient_pvalues(X_bin, y_bin)
        top = select_significant(report, k)

        X_full_sel = X_all.select(top)
        X_bin_sel = X_bin.select(top)
        full_model = ols_fit(X_full_sel, y_all)
        bin_model = ols_fit(X_bin_sel, y_bin)

        m_full = fit_metrics(full_model.predict(X_bin_sel), y_bin)
        m_bin = fit_metrics(bin_model.predict(X_bin_sel), y_bin)
        reports.append(BinReport(
            name=spec.name, n=n_bin, top_features=top,
            r2_full=m_full.r2, mse_full=m_full.mse,
            r2_bin=m_bin.r2, mse_bin=m_bin.mse,
        ))
    return tuple(reports)


@dataclass(frozen=True)
class MisclassCell:
    """Error summary for one (observed, predicted) failure-mode pair."""

    observed: FailureMode
    predicted: FailureMode
    n: int
    min_error: Optional[float]
    max_error: Optional[float]
    mean_error: Optional[float]
    median_error: Optional[float]
    unconservative: bool


def misclass_error_table(records: Sequence[ColumnRecord],
                         predicted_modes: Sequence[FailureMode],
                         mp_errors) -> tuple[MisclassCell, ...]:
    """3x3 error summaries grouped by (observed, predicted) mode.

    ``mp_errors`` follows the experiment - estimate convention.  Cells
    where the prediction is more ductile than the observation are flagged
    unconservative.
    """
    records = list(records)
    predicted_modes = list(predicted_modes)
    errors = np.asarray(mp_errors, dtype=float)
    if not (len(records) == len(predicted_modes) == len(errors)):
        raise LengthMismatch(
            f"lengths differ: {len(records)} records, "
            f"{len(predicted_modes)} predictions, {len(errors)} errors")
    for r in records:
        if r.mode is None:
            raise ValueError(f"record {r.id!r} has no observed failure mode")

    groups: dict[tuple[FailureMode, FailureMode], list[float]] = {}
    for r, p, e in zip(records, predicted_modes, errors):
        groups.setdefault((r.mode, p), []).append(float(e))

    cells = []
    for observed in MODE_ORDER:
        for predicted in MODE_ORDER:
            vals = groups.get((observed, predicted), [])
            arr = np.array(vals)
            has = len(vals) > 0
            cells.append(MisclassCell(
                observed=observed,
                predicted=predicted,
                n=len(vals),
                min_error=float(arr.min()) if has else None,
                max_error=float(arr.max()) if has else None,
                mean_error=float(arr.mean()) if has else None,
                median_error=float(np.median(arr)) if has else None,
                unconservative=DUCTILITY_RANK[predicted] > DUCTILITY_RANK[observed],
            ))
    return tuple(cells)
