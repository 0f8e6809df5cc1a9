"""Fixed-coefficient estimators for modeling parameters a and b.

Four published equation families are evaluated verbatim:

* GM  — the Ghannoum-Matamoros regression adopted in ASCE 41-17, a
        three-variable linear form in axial ratio, rho_t and V_y/V_o.
* MLR — recalibrated three-variable linear forms.  The circular-column
        equation for parameter a swaps V_y/V_o for the span-to-depth ratio.
* PRM — polynomial forms adding the squares of the same three variables.
* RLR — ridge-regularized linear forms over all six input ratios.

Plus a fixed one-vs-all failure-mode classifier (three linear scores per
shape, sigmoid probabilities, argmax decision).

All outputs are clamped to the physical range a >= 0, b >= a.  Published
clamps exist only for the GM family; they are extended to the others
because negative plastic rotations are meaningless.  Raw (unclamped)
values remain available for error statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonFiniteInput
from .types import (
    ColumnFeatures,
    FailureMode,
    ModelingParams,
    SectionShape,
    clamp_params,
)

R = SectionShape.RECTANGULAR
C = SectionShape.CIRCULAR


class EstimatorFamily(Enum):
    """The four fixed-coefficient equation families."""

    GM = "gm"
    MLR = "mlr"
    PRM = "prm"
    RLR = "rlr"


# --------------------------------------------------------------------------
# Coefficient tables (exact published decimals; do not re-derive)
# --------------------------------------------------------------------------

# GM / ASCE 41-17: intercept + c1*axial_ratio + c2*rho_t + c3*(Vy/Vo)
_GM = {
    (R, "a"): (0.042, -0.043, 0.063, -0.023),
    (R, "b"): (0.051, -0.051, 1.3, -0.023),
    (C, "a"): (0.06, -0.058, 1.3, -0.037),
    (C, "b"): (0.064, -0.07, 2.85, -0.03),
}

# MLR: same three-variable structure; the circular-a equation uses a/d as
# its third variable instead of Vy/Vo.
_MLR = {
    (R, "a"): (0.046, -0.043, 0.363, -0.031),
    (R, "b"): (0.054, -0.047, 0.565, -0.03),
    (C, "a"): (-0.002, -0.059, 3.282, 0.007),
    (C, "b"): (0.069, -0.072, 0.742, -0.044),
}

# The third MLR/PRM variable per (shape, target): Vy/Vo everywhere except
# circular a, which uses span-to-depth.
_THIRD_IS_SPAN = {(C, "a")}

# PRM: b0 + b1*axial + b2*rho_t + b3*third + b4*axial^2 + b5*rho_t^2
#      + b6*third^2, with the same variable triplet as MLR.
_PRM = {
    (R, "a"): (0.030, -0.039, 1.488, -0.031, -0.009, -16.166, -0.001),
    (R, "b"): (0.033, -0.012, 2.150, -0.044, -0.056, -23.141, 0.007),
    (C, "a"): (-0.018, -0.027, 6.933, 0.010, -0.057, -280.136, 0.000),
    (C, "b"): (0.079, 0.008, 0.935, -0.088, -0.141, -8.469, 0.024),
}

# RLR: intercept + coefficients over all six ratios in canonical order
# (a/d, axial, rho_l, rho_t, s/d, Vy/Vo).
_RLR = {
    (R, "a"): (0.052, -0.0012, -0.046, 0.36, 0.21, 0.0074, -0.030),
    (R, "b"): (0.055, 0.0019, -0.031, 0.01, 0.0034, -0.027, -0.012),
    (C, "a"): (0.047, 0.003, -0.062, 0.440, 0.622, -0.031, -0.030),
    (C, "b"): (0.043, 0.004, -0.022, 0.003, 0.001, -0.024, -0.014),
}

# Fixed one-vs-all classifier scores: intercept + c1*axial + c2*rho_t
# + c3*(Vy/Vo), one row per failure mode.
_CLASSIFIER = {
    R: {
        FailureMode.FC: (6.94, -3.99, 0.44, -9.21),
        FailureMode.FSC: (-2.19, 0.35, -1.04, 1.63),
        FailureMode.SC: (-7.7, 4.07, -0.05, 5.86),
    },
    C: {
        FailureMode.FC: (5.02, 2.15, -0.2, -6.35),
        FailureMode.FSC: (-1.52, -3.42, 0.02, 0.8),
        FailureMode.SC: (-9.72, 3.68, -0.19, 7.27),
    },
}


@dataclass(frozen=True)
class FamilyEstimate:
    """Clamped and raw modeling-parameter estimates from one family."""

    a: float
    b: float
    raw_a: float
    raw_b: float

    @property
    def params(self) -> ModelingParams:
        return ModelingParams(a=self.a, b=self.b)


@dataclass(frozen=True)
class ClassScores:
    """Linear scores, sigmoid probabilities and the argmax failure mode."""

    score_fc: float
    score_fsc: float
    score_sc: float
    prob_fc: float
    prob_fsc: float
    prob_sc: float
    predicted: FailureMode

    def score(self, mode: FailureMode) -> float:
        return {FailureMode.FC: self.score_fc,
                FailureMode.FSC: self.score_fsc,
                FailureMode.SC: self.score_sc}[mode]

    def probability(self, mode: FailureMode) -> float:
        return {FailureMode.FC: self.prob_fc,
                FailureMode.FSC: self.prob_fsc,
                FailureMode.SC: self.prob_sc}[mode]


def sigmoid(z: float) -> float:
    # stable for large |z|
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def affine(coeffs: np.ndarray, values: np.ndarray) -> float:
    """coeffs[0] + coeffs[1:] . values, the single shared evaluation path.

    Trained one-vs-all models and the fixed classifier both route through
    this helper so equal coefficients give bit-identical scores.
    """
    return float(coeffs[0] + np.dot(coeffs[1:], values))


def pick_mode(score_fc: float, score_fsc: float, score_sc: float) -> FailureMode:
    """Argmax failure mode; ties go to the more brittle (conservative) mode."""
    best = FailureMode.SC
    best_score = score_sc
    for mode, score in ((FailureMode.FSC, score_fsc), (FailureMode.FC, score_fc)):
        if score > best_score:
            best, best_score = mode, score
    return best


def _require_finite(f: ColumnFeatures) -> None:
    vals = (f.span_depth, f.axial_ratio, f.rho_l, f.rho_t,
            f.spacing_depth, f.shear_ratio)
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteInput(f"non-finite feature values: {vals}")


def _third_value(f: ColumnFeatures, shape: SectionShape, target: str) -> float:
    """Third variable of the MLR/PRM triplet (GM always uses Vy/Vo)."""
    return f.span_depth if (shape, target) in _THIRD_IS_SPAN else f.shear_ratio


def _linear3(table, f: ColumnFeatures, shape: SectionShape, target: str,
             third: float) -> float:
    c0, c1, c2, c3 = table[(shape, target)]
    return c0 + c1 * f.axial_ratio + c2 * f.rho_t + c3 * third


def gm_raw(f: ColumnFeatures, shape: SectionShape) -> tuple[float, float]:
    """Unclamped GM estimates (a, b)."""
    _require_finite(f)
    return (_linear3(_GM, f, shape, "a", f.shear_ratio),
            _linear3(_GM, f, shape, "b", f.shear_ratio))


def mlr_raw(f: ColumnFeatures, shape: SectionShape) -> tuple[float, float]:
    """Unclamped fixed-MLR estimates (a, b)."""
    _require_finite(f)
    return (_linear3(_MLR, f, shape, "a", _third_value(f, shape, "a")),
            _linear3(_MLR, f, shape, "b", _third_value(f, shape, "b")))


def _prm_one(f: ColumnFeatures, shape: SectionShape, target: str) -> float:
    b0, b1, b2, b3, b4, b5, b6 = _PRM[(shape, target)]
    x1 = f.axial_ratio
    x2 = f.rho_t
    x3 = _third_value(f, shape, target)
    return (b0 + b1 * x1 + b2 * x2 + b3 * x3
            + b4 * x1 * x1 + b5 * x2 * x2 + b6 * x3 * x3)


def prm_raw(f: ColumnFeatures, shape: SectionShape) -> tuple[float, float]:
    """Unclamped fixed-PRM estimates (a, b)."""
    _require_finite(f)
    return _prm_one(f, shape, "a"), _prm_one(f, shape, "b")


def _rlr_one(f: ColumnFeatures, shape: SectionShape, target: str) -> float:
    c = _RLR[(shape, target)]
    return (c[0] + c[1] * f.span_depth + c[2] * f.axial_ratio
            + c[3] * f.rho_l + c[4] * f.rho_t
            + c[5] * f.spacing_depth + c[6] * f.shear_ratio)


def rlr_raw(f: ColumnFeatures, shape: SectionShape) -> tuple[float, float]:
    """Unclamped fixed-RLR estimates (a, b)."""
    _require_finite(f)
    return _rlr_one(f, shape, "a"), _rlr_one(f, shape, "b")


_RAW = {
    EstimatorFamily.GM: gm_raw,
    EstimatorFamily.MLR: mlr_raw,
    EstimatorFamily.PRM: prm_raw,
    EstimatorFamily.RLR: rlr_raw,
}


def estimate(family: EstimatorFamily, f: ColumnFeatures,
             shape: SectionShape) -> FamilyEstimate:
    """Evaluate one family, returning clamped and raw values."""
    raw_a, raw_b = _RAW[family](f, shape)
    params = clamp_params(raw_a, raw_b)
    return FamilyEstimate(a=params.a, b=params.b, raw_a=raw_a, raw_b=raw_b)


def estimate_gm(f: ColumnFeatures, shape: SectionShape) -> ModelingParams:
    return estimate(EstimatorFamily.GM, f, shape).params


def estimate_mlr_fixed(f: ColumnFeatures, shape: SectionShape) -> ModelingParams:
    return estimate(EstimatorFamily.MLR, f, shape).params


def estimate_prm_fixed(f: ColumnFeatures, shape: SectionShape) -> ModelingParams:
    return estimate(EstimatorFamily.PRM, f, shape).params


def estimate_rlr_fixed(f: ColumnFeatures, shape: SectionShape) -> ModelingParams:
    return estimate(EstimatorFamily.RLR, f, shape).params


def classify_fixed(f: ColumnFeatures, shape: SectionShape) -> ClassScores:
    """Failure-mode scores from the fixed classifier coefficients."""
    _require_finite(f)
    x = np.array([f.axial_ratio, f.rho_t, f.shear_ratio])
    table = _CLASSIFIER[shape]
    s_fc = affine(np.asarray(table[FailureMode.FC]), x)
    s_fsc = affine(np.asarray(table[FailureMode.FSC]), x)
    s_sc = affine(np.asarray(table[FailureMode.SC]), x)
    return ClassScores(
        score_fc=s_fc, score_fsc=s_fsc, score_sc=s_sc,
        prob_fc=sigmoid(s_fc), prob_fsc=sigmoid(s_fsc), prob_sc=sigmoid(s_sc),
        predicted=pick_mode(s_fc, s_fsc, s_sc),
    )


def classifier_coefficients(shape: SectionShape) -> dict[FailureMode, np.ndarray]:
    """Fixed classifier coefficient vectors (intercept first), per mode."""
    return {mode: np.array(row, dtype=float)
            for mode, row in _CLASSIFIER[shape].items()}
