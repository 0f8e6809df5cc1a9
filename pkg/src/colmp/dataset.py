"""CSV ingestion, serialization and summary statistics for column datasets.

The one and only ingestion format is CSV with the exact header

    id,shape,a_over_d,axial_ratio,rho_l,rho_t,s_over_d,vy_over_vo,
    mp_a_rad,mp_b_rad,b_source,failure_mode

(single line).  Decimal point is '.', no thousands separators, empty cell
means "absent".  shape is R or C; b_source is B1, B2 or NA; failure_mode
is FC, FSC, SC or NA.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .errors import (
    BLessThanA,
    InsufficientRows,
    InvalidCategory,
    InvalidFeatures,
    MalformedRow,
    MissingColumn,
    NegativeRatio,
    NonNumericCell,
)
from .types import (
    FEATURE_NAMES,
    BSource,
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    DatasetStats,
    FailureMode,
    SectionShape,
)

CSV_HEADER: tuple[str, ...] = (
    "id", "shape", "a_over_d", "axial_ratio", "rho_l", "rho_t",
    "s_over_d", "vy_over_vo", "mp_a_rad", "mp_b_rad", "b_source",
    "failure_mode",
)

# Columns that must parse as finite nonnegative numbers; the two marked
# strict must be > 0.
_STRICT_POSITIVE = {"a_over_d", "s_over_d"}

_SHAPE_TOKENS = {s.value: s for s in SectionShape}
_BSOURCE_TOKENS = {b.value: b for b in BSource}
_MODE_TOKENS = {m.value: m for m in FailureMode}


def _parse_number(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise NonNumericCell(
            f"row {row}, column {column!r}: not a number: {cell!r}",
            row=row, column=column,
        ) from None
    if not math.isfinite(value):
        raise NonNumericCell(
            f"row {row}, column {column!r}: non-finite value {cell!r}",
            row=row, column=column,
        )
    return value


def _parse_ratio(cell: str, row: int, column: str) -> float:
    value = _parse_number(cell, row, column)
    if value < 0.0:
        raise NegativeRatio(
            f"row {row}, column {column!r}: must be >= 0, got {cell!r}",
            row=row, column=column,
        )
    if column in _STRICT_POSITIVE and value == 0.0:
        raise NegativeRatio(
            f"row {row}, column {column!r}: must be > 0, got {cell!r}",
            row=row, column=column,
        )
    return value


def parse_dataset(csv_text: str) -> Dataset:
    """Parse and validate a dataset from CSV text.

    Raises MissingColumn, MalformedRow, NonNumericCell, NegativeRatio,
    InvalidCategory, BLessThanA or DuplicateId; row numbers in messages are
    1-based over data rows.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise MissingColumn("empty input: no header row") from None
    if header != CSV_HEADER:
        missing = [c for c in CSV_HEADER if c not in header]
        if missing:
            raise MissingColumn(f"missing column(s): {', '.join(missing)}")
        raise MissingColumn(
            f"header mismatch: expected {','.join(CSV_HEADER)}"
        )

    records: list[ColumnRecord] = []
    for row_num, cells in enumerate(reader, start=1):
        if not cells:
            continue  # skip blank lines
        if len(cells) != len(CSV_HEADER):
            raise MalformedRow(
                f"row {row_num}: expected {len(CSV_HEADER)} cells, "
                f"got {len(cells)}",
                row=row_num,
            )
        cell = dict(zip(CSV_HEADER, cells))

        shape = _SHAPE_TOKENS.get(cell["shape"])
        if shape is None:
            raise InvalidCategory(
                f"row {row_num}, column 'shape': unknown token "
                f"{cell['shape']!r} (expected R or C)",
                row=row_num, column="shape",
            )

        ratios = {name: _parse_ratio(cell[name], row_num, name)
                  for name in FEATURE_NAMES}
        try:
            features = ColumnFeatures(
                span_depth=ratios["a_over_d"],
                axial_ratio=ratios["axial_ratio"],
                rho_l=ratios["rho_l"],
                rho_t=ratios["rho_t"],
                spacing_depth=ratios["s_over_d"],
                shear_ratio=ratios["vy_over_vo"],
            )
        except InvalidFeatures as exc:  # pragma: no cover - cell checks first
            raise NegativeRatio(f"row {row_num}: {exc}", row=row_num) from exc

        mp_a = None
        if cell["mp_a_rad"] != "":
            mp_a = _parse_ratio(cell["mp_a_rad"], row_num, "mp_a_rad")
        mp_b = None
        if cell["mp_b_rad"] != "":
            mp_b = _parse_ratio(cell["mp_b_rad"], row_num, "mp_b_rad")
        if mp_a is not None and mp_b is not None and mp_b < mp_a:
            raise BLessThanA(
                f"row {row_num}: mp_b_rad ({mp_b}) < mp_a_rad ({mp_a})",
                row=row_num,
            )

        b_token = cell["b_source"]
        b_source = (BSource.NOT_AVAILABLE if b_token == ""
                    else _BSOURCE_TOKENS.get(b_token))
        if b_source is None:
            raise InvalidCategory(
                f"row {row_num}, column 'b_source': unknown token {b_token!r}",
                row=row_num, column="b_source",
            )

        mode_token = cell["failure_mode"]
        mode = None
        if mode_token not in ("", "NA"):
            mode = _MODE_TOKENS.get(mode_token)
            if mode is None:
                raise InvalidCategory(
                    f"row {row_num}, column 'failure_mode': unknown token "
                    f"{mode_token!r}", row=row_num, column="failure_mode",
                )

        records.append(ColumnRecord(
            id=cell["id"], shape=shape, features=features,
            mp_a=mp_a, mp_b=mp_b, b_source=b_source, mode=mode,
        ))

    return Dataset(records)  # Dataset raises DuplicateId


def _fmt(value: float) -> str:
    # repr round-trips Python floats exactly, guaranteeing
    # parse(serialize(ds)) == ds
    return repr(float(value))


def dataset_to_csv(ds: Dataset) -> str:
    """Serialize a dataset back to schema CSV (exact float round-trip)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in ds:
        f = r.features
        writer.writerow([
            r.id,
            r.shape.value,
            _fmt(f.span_depth), _fmt(f.axial_ratio), _fmt(f.rho_l),
            _fmt(f.rho_t), _fmt(f.spacing_depth), _fmt(f.shear_ratio),
            "" if r.mp_a is None else _fmt(r.mp_a),
            "" if r.mp_b is None else _fmt(r.mp_b),
            r.b_source.value,
            "" if r.mode is None else r.mode.value,
        ])
    return out.getvalue()


def dataset_stats(ds: Dataset, shape: SectionShape) -> DatasetStats:
    """Mean/min/max/range (and population std) per feature for one shape.

    Requires at least two rows of the shape.  A feature whose rows are all
    identical is allowed but flagged in ``zero_range_features``: the mean
    separation parameter divides by the range.
    """
    rows = ds.by_shape(shape)
    if len(rows) < 2:
        raise InsufficientRows(
            f"need >= 2 rows of shape {shape.value}, got {len(rows)}"
        )
    values = np.array([r.features.as_array() for r in rows])
    # reductions run over sorted columns so results are bit-identical
    # under any row permutation of the dataset
    values = np.sort(values, axis=0)
    minimum = values[0]
    maximum = values[-1]
    value_range = maximum - minimum
    zero = tuple(name for name, rng in zip(FEATURE_NAMES, value_range)
                 if rng == 0.0)
    return DatasetStats(
        shape=shape,
        n=len(rows),
        mean=values.mean(axis=0),
        minimum=minimum,
        maximum=maximum,
        value_range=value_range,
        std=values.std(axis=0),
        zero_range_features=zero,
    )
