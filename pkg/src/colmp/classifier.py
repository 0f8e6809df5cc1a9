"""Trainable one-vs-all logistic classifier for failure modes.

Three binary logistic models (FC, FSC, SC vs rest) are fit independently
by full-batch gradient descent on the cross-entropy cost; prediction takes
the argmax of the three linear scores with ties broken toward the more
brittle mode.  Also houses the 3x3 confusion matrix with the conservative
vs unconservative split implied by the ductility order FC > FSC > SC.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .closed_form import ClassScores, affine, pick_mode, sigmoid
from .errors import (
    DimensionMismatch,
    DivergenceDetected,
    LengthMismatch,
    SingleClassData,
)
from .linear import INTERCEPT_NAME, DesignMatrix
from .types import DUCTILITY_RANK, FailureMode

MODE_ORDER = (FailureMode.FC, FailureMode.FSC, FailureMode.SC)


@dataclass
class OvaModel:
    """Three aligned binary logistic coefficient vectors (intercept first)."""

    feature_names: tuple[str, ...]
    coefficients: dict[FailureMode, np.ndarray]
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        want = len(self.feature_names) + 1
        for mode in MODE_ORDER:
            c = np.asarray(self.coefficients[mode], dtype=float)
            if c.shape != (want,):
                raise DimensionMismatch(
                    f"{mode.value} coefficients have shape {c.shape}, "
                    f"expected ({want},)")
            self.coefficients[mode] = c


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed (predicted, true) in FC/FSC/SC order."""

    counts: np.ndarray
    total: int
    accuracy: float
    recall: dict[FailureMode, float]
    unconservative_fraction: float
    conservative_fraction: float

    def count(self, predicted: FailureMode, true: FailureMode) -> int:
        return int(self.counts[MODE_ORDER.index(predicted),
                               MODE_ORDER.index(true)])


def _binary_cost(z: np.ndarray, y: np.ndarray) -> float:
    # mean(softplus(z) - y*z): the numerically stable cross-entropy
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def ova_fit(X: DesignMatrix, labels: Sequence[FailureMode], lr: float,
            iters: int, seed: int = 0) -> tuple[OvaModel, dict[FailureMode, np.ndarray]]:
    """Fit the three binary models; returns (model, per-class cost history).

    Costs are recorded after each update, so history[-1] is the cost of the
    returned coefficients.  Coefficients start at zero, making the fit
    deterministic; the seed is recorded in the training metadata.
    """
    labels = list(labels)
    if len(labels) != X.n:
        raise LengthMismatch(f"{len(labels)} labels for {X.n} rows")
    if len(set(labels)) < 2:
        raise SingleClassData("need examples of at least two classes")
    if not X.includes_intercept:
        raise DimensionMismatch("classifier design matrix needs an intercept")

    m = X.n
    values = X.values
    coefficients: dict[FailureMode, np.ndarray] = {}
    histories: dict[FailureMode, np.ndarray] = {}
    for mode in MODE_ORDER:
        y = np.array([1.0 if lab is mode else 0.0 for lab in labels])
        beta = np.zeros(X.p)
        history = np.empty(iters)
        for it in range(iters):
            z = values @ beta
            grad = values.T @ (expit(z) - y) / m
            beta = beta - lr * grad
            cost = _binary_cost(values @ beta, y)
            if not np.isfinite(cost):
                raise DivergenceDetected(
                    f"class {mode.value}: cost non-finite at iteration {it}")
            history[it] = cost
        coefficients[mode] = beta
        histories[mode] = history

    model = OvaModel(
        feature_names=tuple(n for n in X.feature_names if n != INTERCEPT_NAME),
        coefficients=coefficients,
        training_meta={"learning_rate": lr, "iterations": iters, "seed": seed},
    )
    return model, histories


def ova_predict(model: OvaModel, features) -> ClassScores:
    """Scores, sigmoid probabilities and argmax mode for one feature vector.

    ``features`` excludes the intercept and must match the model's feature
    list in length and order.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim != 1 or x.shape[0] != len(model.feature_names):
        raise DimensionMismatch(
            f"expected {len(model.feature_names)} features, got {x.shape}")
    s_fc = affine(model.coefficients[FailureMode.FC], x)
    s_fsc = affine(model.coefficients[FailureMode.FSC], x)
    s_sc = affine(model.coefficients[FailureMode.SC], x)
    return ClassScores(
        score_fc=s_fc, score_fsc=s_fsc, score_sc=s_sc,
        prob_fc=sigmoid(s_fc), prob_fsc=sigmoid(s_fsc), prob_sc=sigmoid(s_sc),
        predicted=pick_mode(s_fc, s_fsc, s_sc),
    )


def confusion_matrix(predicted: Sequence[FailureMode],
                     actual: Sequence[FailureMode]) -> ConfusionMatrix:
    """3x3 confusion counts plus accuracy and ductility-order fractions.

    A prediction more ductile than the observation (e.g. FC predicted for
    an FSC column) is unconservative; the reverse is conservative.
    """
    predicted = list(predicted)
    actual = list(actual)
    if len(predicted) != len(actual) or not predicted:
        raise LengthMismatch(
            f"predicted ({len(predicted)}) and actual ({len(actual)}) "
            f"must have equal nonzero lengths")
    counts = np.zeros((3, 3), dtype=int)
    unconservative = conservative = 0
    for p, a in zip(predicted, actual):
        counts[MODE_ORDER.index(p), MODE_ORDER.index(a)] += 1
        if DUCTILITY_RANK[p] > DUCTILITY_RANK[a]:
            unconservative += 1
        elif DUCTILITY_RANK[p] < DUCTILITY_RANK[a]:
            conservative += 1
    total = len(actual)
    recall = {}
    for j, mode in enumerate(MODE_ORDER):
        class_n = int(counts[:, j].sum())
        recall[mode] = float(counts[j, j] / class_n) if class_n else float("nan")
    return ConfusionMatrix(
        counts=counts,
        total=total,
        accuracy=float(np.trace(counts) / total),
        recall=recall,
        unconservative_fraction=unconservative / total,
        conservative_fraction=conservative / total,
    )
