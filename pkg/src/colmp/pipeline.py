"""Training and evaluation pipelines over column datasets.

Bridges the dataset layer and the numeric trainers: extracts feature
matrices and target vectors, runs the per-family calibration procedures
(significance-based feature selection for MLR/PRM, ridge-strength tuning
for RLR, noise-grid selection for GPR, standardization and optional
feature augmentation for the network), and converts fitted models to and
from persistence artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import artifacts as art
from .classifier import MODE_ORDER, OvaModel, ova_fit, ova_predict
from .closed_form import ClassScores, EstimatorFamily, classify_fixed, estimate
from .errors import CorruptPayload, InsufficientRows
from .evaluation import FitMetrics, fit_metrics
from .gpr import (
    GprModel,
    SqExpKernelParams,
    gpr_fit,
    gpr_predict_many,
    select_noise_variance,
)
from .linear import (
    DesignMatrix,
    LambdaTuneResult,
    LinearModel,
    PValueReport,
    coefficient_pvalues,
    default_lambda_grid,
    expand_squares,
    ols_fit,
    ridge_fit,
    select_significant,
    split_70_30,
    tune_lambda,
)
from .nn import Mlp, MlpConfig, LrSchedule, TrainTrace, mlp_init, mlp_predict, mlp_train
from .types import (
    FEATURE_NAMES,
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    FailureMode,
    SectionShape,
)

CLASSIFIER_FEATURES = ("axial_ratio", "rho_t", "vy_over_vo")


def rows_for_target(ds: Dataset, shape: SectionShape,
                    target: str) -> list[ColumnRecord]:
    """Rows of one shape that carry the requested modeling parameter."""
    if target not in ("a", "b"):
        raise ValueError(f"target must be 'a' or 'b', got {target!r}")
    key = "mp_a" if target == "a" else "mp_b"
    return [r for r in ds.by_shape(shape) if getattr(r, key) is not None]


def feature_matrix(records: Sequence[ColumnRecord]) -> np.ndarray:
    return np.array([r.features.as_array() for r in records])


def target_vector(records: Sequence[ColumnRecord], target: str) -> np.ndarray:
    key = "mp_a" if target == "a" else "mp_b"
    return np.array([getattr(r, key) for r in records], dtype=float)


def feature_value(f: ColumnFeatures, name: str) -> float:
    """Value of a named (possibly squared) feature column."""
    if name == "intercept":
        return 1.0
    if name.endswith("^2"):
        return feature_value(f, name[:-2]) ** 2
    idx = FEATURE_NAMES.index(name)
    return float(f.as_array()[idx])


def named_vector(f: ColumnFeatures, names: Sequence[str]) -> np.ndarray:
    return np.array([feature_value(f, n) for n in names])


# ---------------------------------------------------------------------------
# Per-family training procedures
# ---------------------------------------------------------------------------

@dataclass
class TrainedLinear:
    model: LinearModel
    pvalues: PValueReport
    selected: tuple[str, ...]
    tune: Optional[LambdaTuneResult] = None


def _require_rows(rows, minimum: int, what: str):
    if len(rows) < minimum:
        raise InsufficientRows(
            f"{what}: need >= {minimum} rows, got {len(rows)}")


def train_mlr(ds: Dataset, shape: SectionShape, target: str,
              seed: int = 0, k: int = 3) -> TrainedLinear:
    """Significance-ranked top-k feature selection, then OLS."""
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 10, "mlr")
    X = DesignMatrix.build(feature_matrix(rows), FEATURE_NAMES)
    y = target_vector(rows, target)
    report = coefficient_pvalues(X, y)
    selected = select_significant(report, k)
    model = ols_fit(X.select(selected), y)
    model.training_meta = {"seed": seed, "split": "all rows",
                           "selected": list(selected)}
    return TrainedLinear(model=model, pvalues=report, selected=selected)


def train_prm(ds: Dataset, shape: SectionShape, target: str,
              seed: int = 0, k: int = 3) -> TrainedLinear:
    """Top-k selection, square-term expansion, then OLS."""
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 16, "prm")
    X = DesignMatrix.build(feature_matrix(rows), FEATURE_NAMES)
    y = target_vector(rows, target)
    report = coefficient_pvalues(X, y)
    selected = select_significant(report, k)
    model = ols_fit(expand_squares(X.select(selected)), y)
    model.training_meta = {"seed": seed, "split": "all rows",
                           "selected": list(selected)}
    return TrainedLinear(model=model, pvalues=report, selected=selected)


def train_rlr(ds: Dataset, shape: SectionShape, target: str, seed: int = 0,
              grid: Optional[Sequence[float]] = None) -> TrainedLinear:
    """Tune the ridge strength on a 70/30 split, refit on all rows."""
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 10, "rlr")
    X = DesignMatrix.build(feature_matrix(rows), FEATURE_NAMES)
    y = target_vector(rows, target)
    report = coefficient_pvalues(X, y)
    tune = tune_lambda(X, y, seed, grid if grid is not None
                       else default_lambda_grid())
    model = ridge_fit(X, y, tune.lambda_star)
    model.training_meta = {"seed": seed, "split": "70/30",
                           "lambda": tune.lambda_star}
    return TrainedLinear(model=model, pvalues=report,
                         selected=FEATURE_NAMES, tune=tune)


@dataclass
class TrainedGpr:
    model: GprModel
    noise_var: float
    noise_scores: dict[float, float]


def train_gpr(ds: Dataset, shape: SectionShape, target: str,
              seed: int = 0) -> TrainedGpr:
    """Standardized-input GP; noise picked on a seeded 90/10 split.

    Signal amplitude defaults to std(y) and the length scale to 1 in
    standardized feature space.
    """
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 10, "gpr")
    X = feature_matrix(rows)
    y = target_vector(rows, target)
    params = SqExpKernelParams(sigma_f=float(y.std()) or 1.0, length_scale=1.0)
    noise, scores = select_noise_variance(X, y, params, seed)
    model = gpr_fit(X, y, params, noise, standardize=True)
    return TrainedGpr(model=model, noise_var=noise, noise_scores=scores)


@dataclass
class TrainedMlp:
    model: Mlp
    trace: TrainTrace
    x_mean: np.ndarray
    x_std: np.ndarray
    augmented: bool


def _augment_matrix(X: np.ndarray) -> np.ndarray:
    # columns: six ratios plus (a/d)^2 and (Vy/Vo)^2
    return np.hstack([X, X[:, [0]] ** 2, X[:, [5]] ** 2])


def train_mlp(ds: Dataset, shape: SectionShape, target: str, seed: int = 0,
              epochs: int = 10000, hidden_layers: int = 4,
              hidden_width: int = 200, learning_rate: float = 0.01,
              lr_schedule: Optional[LrSchedule] = None,
              augment: Optional[bool] = None) -> TrainedMlp:
    """Standardize inputs, split 70/30, train the network on the 70%.

    Circular columns get the two squared extra features by default.
    """
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 10, "mlp")
    if augment is None:
        augment = shape is SectionShape.CIRCULAR
    X = feature_matrix(rows)
    if augment:
        X = _augment_matrix(X)
    y = target_vector(rows, target)

    train_idx, val_idx = split_70_30(len(y), seed)
    x_mean = X[train_idx].mean(axis=0)
    x_std = X[train_idx].std(axis=0)
    x_std = np.where(x_std > 0.0, x_std, 1.0)
    Xs = (X - x_mean) / x_std

    config = MlpConfig(
        input_dim=X.shape[1], hidden_layers=hidden_layers,
        hidden_width=hidden_width, epochs=epochs,
        learning_rate=learning_rate,
        lr_schedule=lr_schedule if lr_schedule is not None else LrSchedule.step(),
        seed=seed,
    )
    net = mlp_init(config)
    trained, trace = mlp_train(net, Xs[train_idx], y[train_idx])
    val_pred = mlp_predict(trained, Xs[val_idx])
    trace.final_val_mse = float(np.mean((val_pred - y[val_idx]) ** 2))
    trace.split_seed = seed
    return TrainedMlp(model=trained, trace=trace, x_mean=x_mean,
                      x_std=x_std, augmented=augment)


@dataclass
class TrainedOva:
    model: OvaModel
    histories: dict[FailureMode, np.ndarray]


def train_ova(ds: Dataset, shape: SectionShape, seed: int = 0,
              all_features: bool = False, lr: float = 0.5,
              iters: int = 5000) -> TrainedOva:
    """One-vs-all logistic fit on rows with an observed failure mode."""
    rows = [r for r in ds.by_shape(shape) if r.mode is not None]
    _require_rows(rows, 6, "ova")
    names = FEATURE_NAMES if all_features else CLASSIFIER_FEATURES
    X = DesignMatrix.build(feature_matrix(rows), FEATURE_NAMES).select(names)
    labels = [r.mode for r in rows]
    model, histories = ova_fit(X, labels, lr=lr, iters=iters, seed=seed)
    return TrainedOva(model=model, histories=histories)


# ---------------------------------------------------------------------------
# Artifact conversion
# ---------------------------------------------------------------------------

def linear_artifact(trained: TrainedLinear, shape: SectionShape,
                    target: str) -> art.ModelArtifact:
    m = trained.model
    return art.ModelArtifact(
        model_type="linear-trained", shape=shape, target=target,
        payload={
            "feature_names": list(m.feature_names),
            "coefficients": m.coefficients.tolist(),
            "lambda": m.lam,
        },
        training_meta=dict(m.training_meta),
    )


def gpr_artifact(trained: TrainedGpr, shape: SectionShape,
                 target: str, seed: int = 0) -> art.ModelArtifact:
    m = trained.model
    return art.ModelArtifact(
        model_type="gpr", shape=shape, target=target,
        payload={
            "training_inputs": m.training_inputs.tolist(),
            "dual_weights": m.dual_weights.tolist(),
            "sigma_f": m.kernel.sigma_f,
            "length_scale": m.kernel.length_scale,
            "noise_var": m.noise_var,
            "jitter": m.jitter,
        },
        standardization={
            "x_mean": m.x_mean.tolist(),
            "x_std": m.x_std.tolist(),
            "y_mean": m.y_mean,
        },
        training_meta={"seed": seed,
                       "noise_grid_mse": {repr(k): v for k, v
                                          in trained.noise_scores.items()}},
    )


def mlp_artifact(trained: TrainedMlp, shape: SectionShape,
                 target: str) -> art.ModelArtifact:
    m = trained.model
    cfg = m.config
    return art.ModelArtifact(
        model_type="mlp", shape=shape, target=target,
        payload={
            "layer_sizes": list(cfg.layer_sizes),
            "weights": [w.tolist() for w in m.weights],
            "biases": [b.tolist() for b in m.biases],
            "augmented": trained.augmented,
        },
        standardization={
            "x_mean": trained.x_mean.tolist(),
            "x_std": trained.x_std.tolist(),
        },
        training_meta={
            "seed": cfg.seed, "epochs": cfg.epochs,
            "learning_rate": cfg.learning_rate,
            "lr_gamma": cfg.lr_schedule.gamma,
            "lr_period": cfg.lr_schedule.period,
            "split": "70/30",
            "final_train_mse": trained.trace.final_train_mse,
            "final_val_mse": trained.trace.final_val_mse,
        },
    )


def ova_artifact(trained: TrainedOva, shape: SectionShape) -> art.ModelArtifact:
    m = trained.model
    return art.ModelArtifact(
        model_type="ova", shape=shape, target="mode",
        payload={
            "feature_names": list(m.feature_names),
            "coefficients": {mode.value: m.coefficients[mode].tolist()
                             for mode in MODE_ORDER},
        },
        training_meta=dict(m.training_meta),
    )


class Predictor:
    """A single-target estimator rebuilt from an artifact."""

    def __init__(self, artifact: art.ModelArtifact):
        self.artifact = artifact
        self.model_type = artifact.model_type
        self.shape = artifact.shape
        self.target = artifact.target
        p = artifact.payload
        if self.model_type == "linear-trained":
            self._linear = LinearModel(
                coefficients=np.asarray(p["coefficients"]),
                feature_names=tuple(p["feature_names"]),
                lam=float(p["lambda"]),
            )
        elif self.model_type == "gpr":
            std = artifact.standardization or {}
            inputs = np.asarray(p["training_inputs"], dtype=float)
            params = SqExpKernelParams(sigma_f=float(p["sigma_f"]),
                                       length_scale=float(p["length_scale"]))
            from .gpr import gram_matrix

            K = gram_matrix(inputs, params)
            total = float(p["noise_var"]) + float(p["jitter"])
            try:
                L = np.linalg.cholesky(K + total * np.eye(len(inputs)))
            except np.linalg.LinAlgError as exc:
                raise CorruptPayload(
                    f"gpr artifact Gram matrix not factorizable: {exc}"
                ) from None
            self._gpr = GprModel(
                training_inputs=inputs, kernel=params,
                noise_var=float(p["noise_var"]), chol=L,
                dual_weights=np.asarray(p["dual_weights"], dtype=float),
                jitter=float(p["jitter"]),
                x_mean=np.asarray(std.get("x_mean", np.zeros(inputs.shape[1]))),
                x_std=np.asarray(std.get("x_std", np.ones(inputs.shape[1]))),
                y_mean=float(std.get("y_mean", 0.0)),
            )
        elif self.model_type == "mlp":
            meta = artifact.training_meta
            std = artifact.standardization or {}
            sizes = [int(s) for s in p["layer_sizes"]]
            config = MlpConfig(
                input_dim=sizes[0],
                hidden_layers=len(sizes) - 2,
                hidden_width=sizes[1] if len(sizes) > 2 else 1,
                epochs=int(meta.get("epochs", 0)),
                learning_rate=float(meta.get("learning_rate", 0.01)),
                lr_schedule=LrSchedule(
                    gamma=float(meta.get("lr_gamma", 1.0)),
                    period=int(meta.get("lr_period", 1))),
                seed=int(meta.get("seed", 0)),
            )
            self._mlp = Mlp(
                weights=[np.asarray(w, dtype=float) for w in p["weights"]],
                biases=[np.asarray(b, dtype=float) for b in p["biases"]],
                config=config,
            )
            self._augmented = bool(p.get("augmented", False))
            self._x_mean = np.asarray(std.get("x_mean", np.zeros(sizes[0])))
            self._x_std = np.asarray(std.get("x_std", np.ones(sizes[0])))
        elif self.model_type == "ova":
            self._ova = OvaModel(
                feature_names=tuple(p["feature_names"]),
                coefficients={FailureMode(k): np.asarray(v, dtype=float)
                              for k, v in p["coefficients"].items()},
            )
        elif self.model_type in art.CLOSED_FORM_TYPES:
            self._family = EstimatorFamily(self.model_type)
        else:  # pragma: no cover - artifact validation rejects these
            raise CorruptPayload(f"unsupported model_type {self.model_type!r}")

    def predict_raw(self, f: ColumnFeatures) -> float:
        """Unclamped modeling-parameter estimate for the artifact's target."""
        if self.model_type in art.CLOSED_FORM_TYPES:
            e = estimate(self._family, f, self.shape)
            return e.raw_a if self.target == "a" else e.raw_b
        if self.model_type == "linear-trained":
            x = named_vector(f, self._linear.feature_names)
            return float(x @ self._linear.coefficients)
        if self.model_type == "gpr":
            mean, _ = _gpr_predict_one(self._gpr, f.as_array())
            return mean
        if self.model_type == "mlp":
            x = f.as_array()
            if self._augmented:
                x = np.concatenate([x, [f.span_depth ** 2,
                                        f.shear_ratio ** 2]])
            xs = (x - self._x_mean) / self._x_std
            return float(mlp_predict(self._mlp, xs[None, :])[0])
        raise CorruptPayload(f"{self.model_type} does not predict a/b")

    def predict(self, f: ColumnFeatures) -> float:
        """Clamped (nonnegative) estimate."""
        return max(self.predict_raw(f), 0.0)

    def predict_many_raw(self, feats: Sequence[ColumnFeatures]) -> np.ndarray:
        return np.array([self.predict_raw(f) for f in feats])

    def classify(self, f: ColumnFeatures) -> ClassScores:
        if self.model_type != "ova":
            raise CorruptPayload(f"{self.model_type} is not a classifier")
        x = named_vector(f, self._ova.feature_names)
        return ova_predict(self._ova, x)

    def ova_model(self) -> OvaModel:
        if self.model_type != "ova":
            raise CorruptPayload(f"{self.model_type} is not a classifier")
        return self._ova


def _gpr_predict_one(model: GprModel, x: np.ndarray) -> tuple[float, float]:
    means, variances = gpr_predict_many(model, x[None, :])
    return float(means[0]), float(variances[0])


# ---------------------------------------------------------------------------
# Dataset-level evaluation
# ---------------------------------------------------------------------------

@dataclass
class EvalResult:
    metrics: FitMetrics
    errors: np.ndarray       # experiment - estimate, aligned with ids
    ids: tuple[str, ...]


def evaluate_predictions(ds: Dataset, shape: SectionShape, target: str,
                         predict_fn: Callable[[ColumnFeatures], float]) -> EvalResult:
    """Score a single-target predictor against measured values."""
    rows = rows_for_target(ds, shape, target)
    _require_rows(rows, 2, "evaluation")
    actual = target_vector(rows, target)
    estimated = np.array([predict_fn(r.features) for r in rows])
    return EvalResult(
        metrics=fit_metrics(estimated, actual),
        errors=actual - estimated,
        ids=tuple(r.id for r in rows),
    )


def closed_form_predictor(family: EstimatorFamily, shape: SectionShape,
                          target: str, raw: bool = False,
                          ) -> Callable[[ColumnFeatures], float]:
    def predict(f: ColumnFeatures) -> float:
        e = estimate(family, f, shape)
        if raw:
            return e.raw_a if target == "a" else e.raw_b
        return e.a if target == "a" else e.b
    return predict


def classify_dataset(ds: Dataset, shape: SectionShape,
                     model: Optional[OvaModel] = None,
                     ) -> tuple[list[FailureMode], list[FailureMode]]:
    """(predicted, observed) modes for rows with an observed mode."""
    rows = [r for r in ds.by_shape(shape) if r.mode is not None]
    observed = [r.mode for r in rows]
    if model is None:
        predicted = [classify_fixed(r.features, shape).predicted for r in rows]
    else:
        predicted = [
            ova_predict(model, named_vector(r.features, model.feature_names)).predicted
            for r in rows
        ]
    return predicted, observed
