"""Feedforward network trained by full-batch gradient descent.

Deliberately free of framework dependencies: plain numpy forward/backward
passes, ReLU hidden activations, a linear scalar output, mean-squared-error
loss and an optional step-decay learning-rate schedule.  Everything is
deterministic given (seed, data, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, DivergenceDetected
from .types import ColumnFeatures


@dataclass(frozen=True)
class LrSchedule:
    """Step decay: lr(epoch) = base * gamma ** (epoch // period)."""

    gamma: float = 1.0
    period: int = 1

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.period < 1:
            raise ValueError(f"period must be >= 1, got {self.period}")

    @classmethod
    def constant(cls) -> "LrSchedule":
        return cls(gamma=1.0, period=1)

    @classmethod
    def step(cls, gamma: float = 0.5, period: int = 2000) -> "LrSchedule":
        return cls(gamma=gamma, period=period)

    def rate(self, base_lr: float, epoch: int) -> float:
        return base_lr * self.gamma ** (epoch // self.period)


@dataclass(frozen=True)
class MlpConfig:
    """Network and optimizer settings (defaults: 4 hidden layers of 200)."""

    input_dim: int
    hidden_layers: int = 4
    hidden_width: int = 200
    epochs: int = 10000
    learning_rate: float = 0.01
    lr_schedule: LrSchedule = field(default_factory=LrSchedule.step)
    seed: int = 0

    def __post_init__(self):
        if min(self.input_dim, self.hidden_layers, self.hidden_width) < 1:
            raise ValueError("dims and layer counts must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be > 0")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim,
                *([self.hidden_width] * self.hidden_layers), 1)


@dataclass
class Mlp:
    """Layer weights (fan_in x fan_out) and biases; last layer is linear."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    config: MlpConfig

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "Mlp":
        return Mlp(weights=[w.copy() for w in self.weights],
                   biases=[b.copy() for b in self.biases],
                   config=self.config)


@dataclass
class TrainTrace:
    """Per-epoch loss history plus final fit quality."""

    losses: np.ndarray
    final_train_mse: float
    final_val_mse: Optional[float] = None
    split_seed: Optional[int] = None


def mlp_init(config: MlpConfig) -> Mlp:
    """Seeded Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(config.seed)
    sizes = config.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(weights=weights, biases=biases, config=config)


def _forward_batch(net: Mlp, X: np.ndarray):
    """Returns (activations per layer incl. input, pre-activations, output)."""
    acts = [X]
    zs = []
    a = X
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W + b
        zs.append(z)
        a = np.maximum(z, 0.0) if i < last else z
        acts.append(a)
    return acts, zs, a[:, 0]


def mlp_forward(net: Mlp, x) -> float:
    """Scalar network output for one feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != net.weights[0].shape[0]:
        raise DimensionMismatch(
            f"input has shape {x.shape}, network expects "
            f"({net.weights[0].shape[0]},)")
    _, _, out = _forward_batch(net, x[None, :])
    return float(out[0])


def mlp_predict(net: Mlp, X) -> np.ndarray:
    """Batch forward pass."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != net.weights[0].shape[0]:
        raise DimensionMismatch(
            f"input has {X.shape[1]} columns, network expects "
            f"{net.weights[0].shape[0]}")
    _, _, out = _forward_batch(net, X)
    return out


def mlp_gradients(net: Mlp, X: np.ndarray, y: np.ndarray):
    """Analytic MSE gradients via backpropagation.

    Returns (loss, weight grads, bias grads) with
    loss = mean((pred - y)^2).
    """
    n = X.shape[0]
    acts, zs, pred = _forward_batch(net, X)
    loss = float(np.mean((pred - y) ** 2))
    g = (2.0 / n) * (pred - y)[:, None]
    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    for i in range(len(net.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ g
        grads_b[i] = g.sum(axis=0)
        if i > 0:
            g = (g @ net.weights[i].T) * (zs[i - 1] > 0.0)
    return loss, grads_w, grads_b


def mlp_train(net: Mlp, X, y, trace: bool = True) -> tuple[Mlp, TrainTrace]:
    """Full-batch gradient descent for config.epochs steps.

    The input network is left untouched; a trained copy is returned.
    Raises DivergenceDetected if the loss leaves the finite range.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise DimensionMismatch(f"X {X.shape} / y {y.shape} mismatch")
    if X.shape[1] != net.weights[0].shape[0]:
        raise DimensionMismatch("input width does not match network")

    trained = net.copy()
    cfg = net.config
    losses = np.empty(cfg.epochs) if trace else None
    for epoch in range(cfg.epochs):
        # overflow in a diverging run is reported via DivergenceDetected,
        # not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            loss, grads_w, grads_b = mlp_gradients(trained, X, y)
        if not np.isfinite(loss):
            raise DivergenceDetected(
                f"loss became non-finite at epoch {epoch}")
        if trace:
            losses[epoch] = loss
        lr = cfg.lr_schedule.rate(cfg.learning_rate, epoch)
        for i in range(len(trained.weights)):
            trained.weights[i] -= lr * grads_w[i]
            trained.biases[i] -= lr * grads_b[i]

    final_pred = mlp_predict(trained, X)
    final_mse = float(np.mean((final_pred - y) ** 2))
    if not np.isfinite(final_mse):
        raise DivergenceDetected("final training MSE is non-finite")
    return trained, TrainTrace(
        losses=losses if trace else np.empty(0),
        final_train_mse=final_mse,
    )


GradientFn = Callable[[Mlp, np.ndarray, np.ndarray], tuple]


def _flatten(grads_w, grads_b) -> np.ndarray:
    parts = [g.ravel() for g in grads_w] + [g.ravel() for g in grads_b]
    return np.concatenate(parts)


def grad_check(net: Mlp, X, y, gradient_fn: Optional[GradientFn] = None,
               h: float = 1e-5) -> float:
    """Max relative deviation between analytic and central-difference grads.

    deviation_j = |g_a - g_fd| / max(1, |g_a|, |g_fd|).  Intended for small
    networks (<= 1e4 parameters).  ``gradient_fn`` exists so tests can feed
    a deliberately corrupted gradient and watch the check fail.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if net.parameter_count() > 10_000:
        raise DimensionMismatch(
            f"grad_check is for small nets; {net.parameter_count()} parameters")
    fn = gradient_fn if gradient_fn is not None else mlp_gradients
    _, grads_w, grads_b = fn(net, X, y)
    analytic = _flatten(grads_w, grads_b)

    work = net.copy()
    params = work.weights + work.biases
    fd = np.empty_like(analytic)
    pos = 0
    for arr in params:
        flat = arr.ravel()
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            _, _, up = _forward_batch(work, X)
            loss_up = float(np.mean((up - y) ** 2))
            flat[j] = orig - h
            _, _, down = _forward_batch(work, X)
            loss_down = float(np.mean((down - y) ** 2))
            flat[j] = orig
            fd[pos] = (loss_up - loss_down) / (2.0 * h)
            pos += 1
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(fd)))
    return float(np.max(np.abs(analytic - fd) / denom))


def augment_circular(f: ColumnFeatures) -> np.ndarray:
    """Six base ratios plus (a/d)^2 and (Vy/Vo)^2, in that order."""
    base = f.as_array()
    return np.concatenate([base, [f.span_depth ** 2, f.shear_ratio ** 2]])
