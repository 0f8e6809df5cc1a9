"""Squared-exponential GP: kernel, fit, posterior predictions."""

import math

import numpy as np
import pytest

from colmp.errors import DimensionMismatch, NonFiniteInput
from colmp.gpr import (
    SqExpKernelParams,
    gpr_fit,
    gpr_predict,
    gpr_predict_many,
    gram_matrix,
    kernel_eval,
    select_noise_variance,
)

P11 = SqExpKernelParams(sigma_f=1.0, length_scale=1.0)


def random_training_set(seed=0, n=20, d=6):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2.0, 2.0, size=(n, d))
    y = np.sin(X[:, 0]) + 0.5 * X[:, 1]
    return X, y


class TestKernel:
    def test_zero_distance(self):
        params = SqExpKernelParams(sigma_f=2.0, length_scale=0.7)
        x = np.array([1.0, 2.0, 3.0])
        assert kernel_eval(x, x, params) == 4.0

    def test_hand_value(self):
        # squared distance 2 at unit hyperparameters -> e^-1
        x = np.zeros(6)
        x2 = np.zeros(6)
        x2[0] = 1.0
        x2[1] = 1.0
        assert kernel_eval(x, x2, P11) == pytest.approx(math.exp(-1.0),
                                                        abs=1e-15)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x, x2 = rng.normal(size=(2, 6))
            assert kernel_eval(x, x2, P11) == kernel_eval(x2, x, P11)

    def test_invalid_params(self):
        with pytest.raises(NonFiniteInput):
            SqExpKernelParams(sigma_f=0.0, length_scale=1.0)
        with pytest.raises(NonFiniteInput):
            SqExpKernelParams(sigma_f=1.0, length_scale=-1.0)

    def test_gram_symmetric_to_machine_precision(self):
        X, _ = random_training_set()
        K = gram_matrix(X, P11)
        assert np.array_equal(K, K.T)
        np.testing.assert_array_equal(np.diag(K), np.ones(len(X)))


class TestFit:
    def test_single_point_dual_weight(self):
        params = SqExpKernelParams(sigma_f=2.0, length_scale=1.0)
        model = gpr_fit([[0.0]], [3.0], params, noise_var=0.0)
        # 1x1 system: alpha = y / sigma_f^2, exactly (no jitter needed)
        assert model.dual_weights[0] == pytest.approx(3.0 / 4.0, abs=1e-15)
        assert model.jitter == 0.0

    def test_duplicate_inputs_rescued_and_flagged(self):
        X = [[1.0, 2.0], [1.0, 2.0]]
        model = gpr_fit(X, [1.0, 1.0], P11, noise_var=0.0)
        assert model.jitter > 0.0
        assert model.jitter_escalations >= 1

    def test_random_gram_nearly_psd_and_factorizable(self):
        X, y = random_training_set()
        # eigen-check oracle before any jitter
        K = gram_matrix(X, P11)
        assert np.linalg.eigvalsh(K).min() > -1e-8
        model = gpr_fit(X, y, P11, noise_var=0.0)
        assert model.chol.shape == (20, 20)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gpr_fit([[1.0], [2.0]], [1.0], P11, 0.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteInput):
            gpr_fit([[np.nan]], [1.0], P11, 0.0)


class TestPredict:
    def test_noiseless_interpolation(self):
        X, y = random_training_set()
        model = gpr_fit(X, y, P11, noise_var=0.0)
        preds, _ = gpr_predict_many(model, X)
        assert np.max(np.abs(preds - y)) < 1e-6 * np.max(np.abs(y))

    def test_two_point_hand_posterior(self):
        # one training pair (0, 1); query at unit distance
        model = gpr_fit([[0.0]], [1.0], P11, noise_var=0.0)
        mean, var = gpr_predict(model, [1.0])
        assert mean == pytest.approx(math.exp(-0.5), abs=1e-12)
        assert 0.0 <= var <= 1.0

    def test_prior_recovery_far_away(self):
        X, y = random_training_set()
        model = gpr_fit(X, y, P11, noise_var=0.0)
        mean, var = gpr_predict(model, np.full(6, 100.0))
        assert mean == pytest.approx(0.0, abs=1e-10)
        assert var == pytest.approx(1.0, abs=1e-10)

    def test_variance_bounds(self):
        X, y = random_training_set(seed=2)
        model = gpr_fit(X, y, P11, noise_var=1e-4)
        rng = np.random.default_rng(3)
        queries = rng.uniform(-3.0, 3.0, size=(50, 6))
        _, variances = gpr_predict_many(model, queries)
        assert np.all(variances >= 0.0)
        assert np.all(variances <= P11.sigma_f ** 2 + 1e-12)

    def test_permutation_invariance(self):
        X, y = random_training_set(seed=4)
        perm = np.random.default_rng(5).permutation(len(y))
        m1 = gpr_fit(X, y, P11, noise_var=1e-6)
        m2 = gpr_fit(X[perm], y[perm], P11, noise_var=1e-6)
        queries = np.random.default_rng(6).uniform(-2, 2, size=(10, 6))
        p1, v1 = gpr_predict_many(m1, queries)
        p2, v2 = gpr_predict_many(m2, queries)
        np.testing.assert_allclose(p1, p2, atol=1e-9)
        np.testing.assert_allclose(v1, v2, atol=1e-9)

    def test_query_arity_checked(self):
        model = gpr_fit([[0.0, 0.0]], [1.0], P11, noise_var=0.0)
        with pytest.raises(DimensionMismatch):
            gpr_predict(model, [1.0, 2.0, 3.0])


class TestStandardized:
    def test_standardize_centers_targets(self):
        X, y = random_training_set(seed=7)
        y = y + 100.0  # big offset the prior mean must absorb
        model = gpr_fit(X, y, P11, noise_var=0.0, standardize=True)
        assert model.y_mean == pytest.approx(float(np.mean(y)))
        preds, _ = gpr_predict_many(model, X)
        assert np.max(np.abs(preds - y)) < 1e-5

    def test_far_query_returns_target_mean(self):
        X, y = random_training_set(seed=8)
        y = y + 50.0
        model = gpr_fit(X, y, P11, noise_var=0.0, standardize=True)
        mean, _ = gpr_predict(model, np.full(6, 1e6))
        assert mean == pytest.approx(float(np.mean(y)), abs=1e-8)

    def test_noise_grid_selection(self):
        X, y = random_training_set(seed=9, n=40)
        noise, scores = select_noise_variance(X, y, P11, seed=0)
        assert noise in scores
        assert scores[noise] == min(scores.values())
        assert len(scores) == 3
        # deterministic
        noise2, scores2 = select_noise_variance(X, y, P11, seed=0)
        assert noise == noise2 and scores == scores2
