"""Gaussian process regression with an isotropic squared-exponential kernel.

k(x, x') = sigma_f^2 * exp(-||x - x'||^2 / (2 * length_scale^2))

The prior mean is zero in the space the model is fit in; the fit can
optionally standardize inputs (zero mean, unit variance per column) and
center targets, re-adding the target mean at prediction time.  Posterior
mean and variance come from the stored Cholesky factor and dual weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import (
    DimensionMismatch,
    FactorizationFailed,
    NonFiniteInput,
)

# First factorization attempt adds no jitter so that noiseless fits
# interpolate exactly; on failure the jitter starts at JITTER_BASE*sigma_f^2
# and escalates tenfold up to MAX_ESCALATIONS times.
JITTER_BASE = 1e-10
MAX_ESCALATIONS = 3


@dataclass(frozen=True)
class SqExpKernelParams:
    """Squared-exponential kernel hyperparameters (both > 0)."""

    sigma_f: float
    length_scale: float

    def __post_init__(self):
        for name in ("sigma_f", "length_scale"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise NonFiniteInput(f"{name} must be finite and > 0, got {v!r}")


def kernel_eval(x, x2, params: SqExpKernelParams) -> float:
    """Kernel value for a single pair of input vectors."""
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x2))):
        raise NonFiniteInput("kernel inputs must be finite")
    if x.shape != x2.shape:
        raise DimensionMismatch(f"shape mismatch: {x.shape} vs {x2.shape}")
    d2 = float(np.sum((x - x2) ** 2))
    s = params.sigma_f
    return s * s * math.exp(-d2 / (2.0 * params.length_scale ** 2))


def gram_matrix(X: np.ndarray, params: SqExpKernelParams) -> np.ndarray:
    """Exactly symmetric kernel matrix over the rows of X."""
    d2 = squareform(pdist(X, metric="sqeuclidean"))
    return params.sigma_f ** 2 * np.exp(-d2 / (2.0 * params.length_scale ** 2))


@dataclass
class GprModel:
    """Fitted GP: training inputs (in model space), factor and dual weights."""

    training_inputs: np.ndarray
    kernel: SqExpKernelParams
    noise_var: float
    chol: np.ndarray
    dual_weights: np.ndarray
    jitter: float = 0.0
    jitter_escalations: int = 0
    x_mean: np.ndarray = field(default=None)
    x_std: np.ndarray = field(default=None)
    y_mean: float = 0.0

    def __post_init__(self):
        d = self.training_inputs.shape[1]
        if self.x_mean is None:
            self.x_mean = np.zeros(d)
        if self.x_std is None:
            self.x_std = np.ones(d)

    @property
    def n(self) -> int:
        return self.training_inputs.shape[0]


def _factorize(K: np.ndarray, noise_var: float,
               sigma_f: float) -> tuple[np.ndarray, float, int]:
    """Cholesky of K + (noise + jitter) I with escalating jitter."""
    n = K.shape[0]
    jitters = [0.0] + [JITTER_BASE * sigma_f ** 2 * 10.0 ** k
                       for k in range(MAX_ESCALATIONS + 1)]
    for escalations, jitter in enumerate(jitters):
        try:
            L = np.linalg.cholesky(K + (noise_var + jitter) * np.eye(n))
            return L, jitter, escalations
        except np.linalg.LinAlgError:
            continue
    raise FactorizationFailed(
        f"Gram matrix not positive definite after jitter escalation "
        f"(n={n}, noise_var={noise_var})")


def gpr_fit(X, y, params: SqExpKernelParams, noise_var: float,
            standardize: bool = False) -> GprModel:
    """Build the Gram matrix, factorize and store dual weights.

    With ``standardize`` the inputs are shifted/scaled to zero mean and
    unit variance per column and the targets centered; constants are kept
    on the model so predictions map back to original units.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"X {X.shape} and y {y.shape} are inconsistent")
    if X.shape[0] < 1:
        raise DimensionMismatch("need at least one training point")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("training data must be finite")
    if noise_var < 0.0:
        raise NonFiniteInput(f"noise_var must be >= 0, got {noise_var}")

    d = X.shape[1]
    if standardize:
        x_mean = X.mean(axis=0)
        x_std = X.std(axis=0)
        x_std = np.where(x_std > 0.0, x_std, 1.0)
        y_mean = float(y.mean())
    else:
        x_mean = np.zeros(d)
        x_std = np.ones(d)
        y_mean = 0.0

    Xs = (X - x_mean) / x_std
    K = gram_matrix(Xs, params)
    L, jitter, escalations = _factorize(K, noise_var, params.sigma_f)
    alpha = scipy.linalg.cho_solve((L, True), y - y_mean)
    return GprModel(
        training_inputs=Xs,
        kernel=params,
        noise_var=float(noise_var),
        chol=L,
        dual_weights=alpha,
        jitter=jitter,
        jitter_escalations=escalations,
        x_mean=x_mean,
        x_std=x_std,
        y_mean=y_mean,
    )


def _cross_kernel(model: GprModel, X: np.ndarray) -> np.ndarray:
    Xs = (X - model.x_mean) / model.x_std
    d2 = cdist(Xs, model.training_inputs, metric="sqeuclidean")
    s = model.kernel.sigma_f
    return s * s * np.exp(-d2 / (2.0 * model.kernel.length_scale ** 2))


def gpr_predict(model: GprModel, x) -> tuple[float, float]:
    """Posterior mean and variance (floored at zero) at one query point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.training_inputs.shape[1]:
        raise DimensionMismatch(
            f"query has {x.shape} values, model expects "
            f"{model.training_inputs.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("query point must be finite")
    means, variances = gpr_predict_many(model, x[None, :])
    return float(means[0]), float(variances[0])


def gpr_predict_many(model: GprModel, X) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized posterior mean/variance over query rows."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("query points must be finite")
    k_star = _cross_kernel(model, X)
    means = k_star @ model.dual_weights + model.y_mean
    v = scipy.linalg.solve_triangular(model.chol, k_star.T, lower=True)
    variances = model.kernel.sigma_f ** 2 - np.sum(v * v, axis=0)
    return means, np.maximum(variances, 0.0)


NOISE_GRID_FACTORS = (1e-6, 1e-4, 1e-2)


def select_noise_variance(X, y, params: SqExpKernelParams,
                          seed: int) -> tuple[float, dict[float, float]]:
    """Pick the noise level from a small grid via a seeded 90/10 split.

    Candidates are {1e-6, 1e-4, 1e-2} * var(y); the winner minimizes
    validation MSE.  Returns (noise_var, per-candidate val MSE).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 10:
        raise DimensionMismatch(f"need n >= 10 for a 90/10 split, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(0.9 * n))
    train, val = perm[:n_train], perm[n_train:]

    var_y = float(np.var(y[train]))
    scores: dict[float, float] = {}
    best, best_mse = None, np.inf
    for factor in NOISE_GRID_FACTORS:
        noise = factor * var_y
        model = gpr_fit(X[train], y[train], params, noise, standardize=True)
        pred, _ = gpr_predict_many(model, X[val])
        mse = float(np.mean((pred - y[val]) ** 2))
        scores[noise] = mse
        if mse < best_mse:
            best, best_mse = noise, mse
    return best, scores
