"""From-scratch linear model calibration.

Ordinary least squares with classical t-test inference, top-k feature
selection by p-value, ridge regression with an unpenalized intercept,
train/validation tuning of the ridge strength, square-term polynomial
expansion and k-fold cross-validation.

All solves go through Cholesky factorization of the (regularized) normal
equations; with at most ~13 columns this is fast and accurate, and a
failed factorization is the rank-deficiency signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg
from scipy import stats

from .errors import (
    DimensionMismatch,
    EmptyGrid,
    InsufficientRows,
    KOutOfRange,
    KTooLarge,
    SingularMatrix,
    ZeroResidualVariance,
)

INTERCEPT_NAME = "intercept"


@dataclass
class DesignMatrix:
    """A named, validated observation matrix.

    When ``includes_intercept`` is true the first column is all ones and
    the first name is "intercept".
    """

    values: np.ndarray
    feature_names: tuple[str, ...]
    includes_intercept: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.feature_names = tuple(self.feature_names)
        if self.values.ndim != 2:
            raise DimensionMismatch("design matrix must be 2-D")
        n, p = self.values.shape
        if n < 1 or p < 1:
            raise DimensionMismatch(f"empty design matrix: {n}x{p}")
        if len(self.feature_names) != p:
            raise DimensionMismatch(
                f"{p} columns but {len(self.feature_names)} names")
        if len(set(self.feature_names)) != p:
            raise DimensionMismatch("feature names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise DimensionMismatch("design matrix contains non-finite values")
        if self.includes_intercept and self.feature_names[0] != INTERCEPT_NAME:
            raise DimensionMismatch(
                "intercept column must be first and named 'intercept'")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @classmethod
    def build(cls, values, feature_names: Sequence[str],
              add_intercept: bool = True) -> "DesignMatrix":
        """Assemble a matrix, optionally prepending a ones column."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        names = tuple(feature_names)
        if add_intercept:
            ones = np.ones((values.shape[0], 1))
            values = np.hstack([ones, values])
            names = (INTERCEPT_NAME,) + names
        return cls(values=values, feature_names=names,
                   includes_intercept=add_intercept)

    def take_rows(self, idx) -> "DesignMatrix":
        return DesignMatrix(values=self.values[idx],
                            feature_names=self.feature_names,
                            includes_intercept=self.includes_intercept)

    def select(self, names: Sequence[str]) -> "DesignMatrix":
        """Keep the intercept (if any) plus the named columns, in X's order."""
        keep = [INTERCEPT_NAME] if self.includes_intercept else []
        keep += [n for n in self.feature_names
                 if n in set(names) and n != INTERCEPT_NAME]
        idx = [self.feature_names.index(n) for n in keep]
        return DesignMatrix(values=self.values[:, idx],
                            feature_names=tuple(keep),
                            includes_intercept=self.includes_intercept)


@dataclass
class LinearModel:
    """Fitted linear coefficients aligned to feature names."""

    coefficients: np.ndarray
    feature_names: tuple[str, ...]
    lam: float = 0.0
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (len(self.feature_names),):
            raise DimensionMismatch("coefficient/name count mismatch")
        if not np.all(np.isfinite(self.coefficients)):
            raise DimensionMismatch("non-finite coefficients")

    def predict(self, X) -> np.ndarray:
        values = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
        if values.ndim == 1:
            values = values[None, :]
        if values.shape[1] != len(self.coefficients):
            raise DimensionMismatch(
                f"model has {len(self.coefficients)} coefficients, "
                f"input has {values.shape[1]} columns")
        return values @ self.coefficients


@dataclass
class PValueReport:
    """Classical OLS inference: per-column t statistics and p-values."""

    feature_names: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    dof: int
    includes_intercept: bool


class LambdaPoint(NamedTuple):
    lam: float
    train_cost: float
    val_cost: float


@dataclass
class LambdaTuneResult:
    """Outcome of the ridge-strength sweep over a 70/30 split."""

    lambda_star: float
    curve: tuple[LambdaPoint, ...]
    split_seed: int
    n_train: int
    n_val: int


@dataclass
class KfoldResult:
    fold_r2: tuple[float, ...]
    fold_mse: tuple[float, ...]
    fold_sizes: tuple[int, ...]
    mean_r2: float
    mean_mse: float
    seed: int


def _check_y(X: DesignMatrix, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != X.n:
        raise DimensionMismatch(
            f"target length {y.shape} does not match {X.n} rows")
    if not np.all(np.isfinite(y)):
        raise DimensionMismatch("target contains non-finite values")
    return y


def _cholesky_solve(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrix(f"normal equations not SPD: {exc}") from None
    return scipy.linalg.cho_solve(factor, rhs)


def ols_fit(X: DesignMatrix, y) -> LinearModel:
    """Least-squares coefficients via the normal equations."""
    y = _check_y(X, y)
    if X.n <= X.p:
        raise SingularMatrix(f"need n > p, got n={X.n}, p={X.p}")
    beta = _cholesky_solve(X.values.T @ X.values, X.values.T @ y)
    return LinearModel(coefficients=beta, feature_names=X.feature_names)


def coefficient_pvalues(X: DesignMatrix, y) -> PValueReport:
    """Two-sided t-test p-values for every coefficient.

    se_j = sqrt(sigma2 * [(X'X)^-1]_jj) with sigma2 = SSR / (n - p); the
    reference distribution is Student-t with n - p degrees of freedom.
    """
    y = _check_y(X, y)
    n, p = X.n, X.p
    if n <= p + 1:
        raise InsufficientRows(f"need n > p + 1, got n={n}, p={p}")
    xtx = X.values.T @ X.values
    try:
        factor = scipy.linalg.cho_factor(xtx, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrix(f"normal equations not SPD: {exc}") from None
    beta = scipy.linalg.cho_solve(factor, X.values.T @ y)
    resid = y - X.values @ beta
    ssr = float(resid @ resid)
    if ssr <= 1e-12 * max(1.0, float(y @ y)):
        raise ZeroResidualVariance(
            "residual variance is (numerically) zero; p-values undefined")
    dof = n - p
    sigma2 = ssr / dof
    xtx_inv_diag = np.diag(scipy.linalg.cho_solve(factor, np.eye(p)))
    std_errors = np.sqrt(sigma2 * xtx_inv_diag)
    t_stats = beta / std_errors
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), dof)
    return PValueReport(
        feature_names=X.feature_names,
        coefficients=beta,
        std_errors=std_errors,
        t_stats=t_stats,
        p_values=p_values,
        dof=dof,
        includes_intercept=X.includes_intercept,
    )


def select_significant(report: PValueReport, k: int) -> tuple[str, ...]:
    """The k non-intercept features with smallest p-values.

    Returned in original column order; p-value ties are also broken by
    column order.
    """
    candidates = [
        (i, name) for i, name in enumerate(report.feature_names)
        if not (report.includes_intercept and i == 0)
    ]
    if k > len(candidates):
        raise KTooLarge(f"k={k} > {len(candidates)} non-intercept features")
    ranked = sorted(candidates, key=lambda c: (report.p_values[c[0]], c[0]))
    chosen = sorted(ranked[:k], key=lambda c: c[0])
    return tuple(name for _, name in chosen)


def ridge_fit(X: DesignMatrix, y, lam: float) -> LinearModel:
    """Ridge coefficients with an unpenalized intercept.

    Minimizes SSR/(2n) + lam * sum(beta_j^2)/(2n) over non-intercept
    coefficients, i.e. solves (X'X + lam*D) beta = X'y with D the identity
    zeroed at the intercept position.
    """
    y = _check_y(X, y)
    if lam < 0.0:
        raise EmptyGrid(f"lambda must be >= 0, got {lam}")
    penalty = np.eye(X.p)
    if X.includes_intercept:
        penalty[0, 0] = 0.0
    beta = _cholesky_solve(X.values.T @ X.values + lam * penalty,
                           X.values.T @ y)
    return LinearModel(coefficients=beta, feature_names=X.feature_names,
                       lam=float(lam))


def half_mse(model: LinearModel, X: DesignMatrix, y: np.ndarray) -> float:
    """Half mean squared prediction error (the unpenalized cost)."""
    resid = y - model.predict(X)
    return float(resid @ resid) / (2.0 * len(y))


def split_70_30(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic 70/30 row split (unstratified)."""
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(0.7 * n))
    return perm[:n_train], perm[n_train:]


def tune_lambda(X: DesignMatrix, y, split_seed: int,
                grid: Sequence[float]) -> LambdaTuneResult:
    """Sweep the ridge strength over a fixed 70/30 split.

    For each grid value the model is fit on the training subset and the
    half-MSE cost is evaluated on both subsets; the winner minimizes the
    summed train + validation cost (first minimum on ties).
    """
    y = _check_y(X, y)
    grid = [float(g) for g in grid]
    if not grid:
        raise EmptyGrid("lambda grid is empty")
    if any(g < 0.0 for g in grid):
        raise EmptyGrid("lambda grid contains negative values")
    if X.n < 10:
        raise InsufficientRows(f"need n >= 10 to split, got {X.n}")

    train_idx, val_idx = split_70_30(X.n, split_seed)
    X_train, y_train = X.take_rows(train_idx), y[train_idx]
    X_val, y_val = X.take_rows(val_idx), y[val_idx]

    curve = []
    for lam in grid:
        model = ridge_fit(X_train, y_train, lam)
        curve.append(LambdaPoint(
            lam=lam,
            train_cost=half_mse(model, X_train, y_train),
            val_cost=half_mse(model, X_val, y_val),
        ))
    best = min(range(len(curve)),
               key=lambda i: curve[i].train_cost + curve[i].val_cost)
    return LambdaTuneResult(
        lambda_star=grid[best],
        curve=tuple(curve),
        split_seed=split_seed,
        n_train=len(train_idx),
        n_val=len(val_idx),
    )


def default_lambda_grid() -> tuple[float, ...]:
    """{0} plus 25 log-spaced points over [1e-4, 1e2]."""
    return (0.0,) + tuple(np.logspace(-4.0, 2.0, 25))


def expand_squares(X: DesignMatrix) -> DesignMatrix:
    """Append the square of every non-intercept column, names suffixed ^2."""
    start = 1 if X.includes_intercept else 0
    base = X.values[:, start:]
    names = X.feature_names[start:]
    values = np.hstack([X.values, base ** 2])
    sq_names = tuple(f"{n}^2" for n in names)
    return DesignMatrix(values=values,
                        feature_names=X.feature_names + sq_names,
                        includes_intercept=X.includes_intercept)


Trainer = Callable[[DesignMatrix, np.ndarray], LinearModel]


def kfold_cv(X: DesignMatrix, y, k: int, trainer: Trainer,
             seed: int) -> KfoldResult:
    """Seeded k-fold cross-validation; every row is validated exactly once."""
    y = _check_y(X, y)
    if not 2 <= k <= X.n:
        raise KOutOfRange(f"k must be in [2, {X.n}], got {k}")
    perm = np.random.default_rng(seed).permutation(X.n)
    folds = np.array_split(perm, k)

    fold_r2, fold_mse = [], []
    for i in range(k):
        val_idx = folds[i]
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        model = trainer(X.take_rows(train_idx), y[train_idx])
        pred = model.predict(X.take_rows(val_idx))
        resid = y[val_idx] - pred
        ss_res = float(resid @ resid)
        centered = y[val_idx] - y[val_idx].mean()
        ss_tot = float(centered @ centered)
        fold_mse.append(ss_res / len(val_idx))
        fold_r2.append(1.0 - ss_res / ss_tot if ss_tot > 0.0 else float("nan"))
    return KfoldResult(
        fold_r2=tuple(fold_r2),
        fold_mse=tuple(fold_mse),
        fold_sizes=tuple(len(f) for f in folds),
        mean_r2=float(np.mean(fold_r2)),
        mean_mse=float(np.mean(fold_mse)),
        seed=seed,
    )
