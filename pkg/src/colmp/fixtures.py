"""Seeded synthetic dataset generator.

The real 490-test experimental database is not redistributable, so tests
and demos run on synthetic fixtures: features drawn uniformly from
plausible ranges, modeling parameters from the fixed MLR equations plus
Gaussian noise (sigma = 0.005 rad, clamped to a >= 0, b >= a), and failure
modes from the fixed classifier.
"""

from __future__ import annotations

import numpy as np

from .closed_form import classify_fixed, mlr_raw
from .types import (
    BSource,
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    SectionShape,
)

# Uniform sampling ranges per feature, wide enough to cover the behavioral
# regimes of interest (short through slender, tension through compression
# controlled, flexure through shear critical).
FIXTURE_RANGES: dict[str, tuple[float, float]] = {
    "a_over_d": (1.0, 8.0),
    "axial_ratio": (0.0, 0.7),
    "rho_l": (0.005, 0.04),
    "rho_t": (0.0005, 0.02),
    "s_over_d": (0.1, 1.0),
    "vy_over_vo": (0.2, 1.5),
}

MP_NOISE_STD = 0.005  # rad


def _make_rows(rng: np.random.Generator, shape: SectionShape, count: int,
               prefix: str) -> list[ColumnRecord]:
    rows = []
    for i in range(count):
        lows = [FIXTURE_RANGES[k][0] for k in FIXTURE_RANGES]
        highs = [FIXTURE_RANGES[k][1] for k in FIXTURE_RANGES]
        values = rng.uniform(lows, highs)
        features = ColumnFeatures.from_array(values)

        raw_a, raw_b = mlr_raw(features, shape)
        noisy_a = raw_a + rng.normal(0.0, MP_NOISE_STD)
        noisy_b = raw_b + rng.normal(0.0, MP_NOISE_STD)
        mp_a = max(noisy_a, 0.0)
        mp_b = max(noisy_b, mp_a)

        mode = classify_fixed(features, shape).predicted
        b_source = (BSource.B1_MEASURED if rng.random() < 0.8
                    else BSource.B2_GENERATED)

        rows.append(ColumnRecord(
            id=f"{prefix}{i + 1:04d}",
            shape=shape,
            features=features,
            mp_a=float(mp_a),
            mp_b=float(mp_b),
            b_source=b_source,
            mode=mode,
        ))
    return rows


def generate_fixture(seed: int, n_rect: int, n_circ: int) -> Dataset:
    """Deterministic synthetic dataset with n_rect + n_circ rows."""
    if n_rect < 0 or n_circ < 0:
        raise ValueError("row counts must be >= 0")
    rng = np.random.default_rng(seed)
    rows = _make_rows(rng, SectionShape.RECTANGULAR, n_rect, "R")
    rows += _make_rows(rng, SectionShape.CIRCULAR, n_circ, "C")
    return Dataset(rows)
