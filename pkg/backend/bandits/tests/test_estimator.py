"""Tests for the recursive regularized least-squares estimator."""
import numpy as np
import pytest

from bandits.estimator import RegularizedLeastSquares
from bandits.exceptions import DomainError, UsageError


def _unit_rows(rng, t, d):
    X = rng.standard_normal((t, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


class TestEstimate:
    def test_zero_before_updates(self):
        est = RegularizedLeastSquares.scaled_identity(4, 1.0)
        assert np.array_equal(est.estimate(), np.zeros(4))
        assert est.t == 0

    def test_matches_dense_normal_equations(self):
        """Recursive state reproduces a direct solve of (W0 + X^T X) theta = X^T y."""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            d = int(rng.choice([2, 5, 8]))
            t = int(rng.integers(1, 501))
            kappa = float(rng.uniform(0.1, 3.0))
            X = _unit_rows(rng, t, d)
            y = X @ rng.standard_normal(d) + rng.standard_normal(t)

            est = RegularizedLeastSquares.scaled_identity(d, kappa)
            for x, reward in zip(X, y):
                est.update(x, reward)

            expected = np.linalg.solve(kappa * np.eye(d) + X.T @ X, X.T @ y)
            assert np.allclose(est.estimate(), expected, rtol=1e-10, atol=1e-10)

    def test_general_regularizer(self):
        rng = np.random.default_rng(5)
        W0 = np.diag([0.5, 2.0, 4.0])
        X = _unit_rows(rng, 40, 3)
        y = rng.standard_normal(40)
        est = RegularizedLeastSquares(W0)
        for x, reward in zip(X, y):
            est.update(x, reward)
        expected = np.linalg.solve(W0 + X.T @ X, X.T @ y)
        assert np.allclose(est.estimate(), expected, rtol=1e-10, atol=1e-10)

    def test_state_matches_gram_matrix_and_moment_vector(self):
        rng = np.random.default_rng(3)
        X = _unit_rows(rng, 100, 4)
        y = rng.standard_normal(100)
        est = RegularizedLeastSquares.scaled_identity(4, 1.5)
        for t, (x, reward) in enumerate(zip(X, y), start=1):
            est.update(x, reward)
            assert np.trace(est.W) <= np.trace(est.W0) + t + 1e-12
        assert np.allclose(est.W, 1.5 * np.eye(4) + X.T @ X, rtol=1e-12, atol=1e-12)
        assert np.allclose(est.s, X.T @ y, rtol=1e-12, atol=1e-12)

    def test_zero_action_only_advances_round(self):
        est = RegularizedLeastSquares.scaled_identity(3, 1.0)
        est.update([0.0, 1.0, 0.0], 0.4)
        W, s, log_det = est.W.copy(), est.s.copy(), est.log_det_W
        est.update(np.zeros(3), 2.5)
        assert np.array_equal(est.W, W)
        assert np.array_equal(est.s, s)
        assert est.log_det_W == log_det
        assert est.t == 2

    def test_update_returns_self(self):
        est = RegularizedLeastSquares.scaled_identity(2, 1.0)
        assert est.update([1.0, 0.0], 0.5) is est
        assert est.t == 1

    def test_dimension_mismatch(self):
        est = RegularizedLeastSquares.scaled_identity(3, 1.0)
        with pytest.raises(UsageError):
            est.update([1.0, 0.0], 1.0)

    def test_rejects_indefinite_regularizer(self):
        with pytest.raises(DomainError):
            RegularizedLeastSquares(np.diag([1.0, -1.0]))

    def test_scaled_identity_validation(self):
        with pytest.raises(UsageError):
            RegularizedLeastSquares.scaled_identity(3, 0.0)


class TestLogDet:
    def test_running_log_det_matches_factorization(self):
        rng = np.random.default_rng(7)
        est = RegularizedLeastSquares.scaled_identity(5, 1.0)
        for x in _unit_rows(rng, 300, 5):
            est.update(x, 0.0)
        assert est.log_det_W == pytest.approx(est.log_det_W_exact(), rel=1e-10)

    def test_initial_log_det(self):
        est = RegularizedLeastSquares.scaled_identity(4, 2.0)
        assert est.log_det_W0 == pytest.approx(4 * np.log(2.0))


class TestConfidenceRadius:
    def test_before_updates(self):
        """With W_t = W_0 only the delta term and the bias term remain."""
        est = RegularizedLeastSquares.scaled_identity(5, 1.0)
        expected = np.sqrt(2.0 * np.log(10.0)) + 1.0
        assert est.confidence_radius(0.1, 1.0, 1.0, 1.0) == pytest.approx(expected)

    def test_literal_uses_sigma_squared(self):
        est = RegularizedLeastSquares.scaled_identity(3, 1.0)
        est.update([1.0, 0.0, 0.0], 0.3)
        relaxed = est.confidence_radius(0.1, 2.0, 1.0, 1.0)
        literal = est.confidence_radius(0.1, 2.0, 1.0, 1.0, literal=True)
        assert literal - 1.0 == pytest.approx(2.0 * (relaxed - 1.0))

    def test_grows_with_data(self):
        est = RegularizedLeastSquares.scaled_identity(2, 1.0)
        before = est.confidence_radius(0.1, 1.0, 1.0, 1.0)
        est.update([1.0, 0.0], 0.0)
        assert est.confidence_radius(0.1, 1.0, 1.0, 1.0) > before

    @pytest.mark.parametrize('delta', [0.0, 1.0, -0.5, 2.0])
    def test_delta_out_of_range(self, delta):
        est = RegularizedLeastSquares.scaled_identity(2, 1.0)
        with pytest.raises(UsageError):
            est.confidence_radius(delta, 1.0, 1.0, 1.0)

    def test_requires_scaled_identity(self):
        est = RegularizedLeastSquares(np.diag([1.0, 2.0]))
        with pytest.raises(UsageError):
            est.confidence_radius(0.1, 1.0, 1.0, 1.0)


class TestContains:
    def test_estimate_is_inside(self):
        est = RegularizedLeastSquares.scaled_identity(3, 1.0)
        est.update([0.0, 1.0, 0.0], 0.7)
        assert est.contains(est.estimate(), 0.0)

    def test_far_point_is_outside(self):
        est = RegularizedLeastSquares.scaled_identity(2, 1.0)
        assert not est.contains([10.0, 0.0], 1.0)

    def test_coverage(self):
        """The true parameter stays in the confidence set in at least 1 - delta of runs."""
        rng = np.random.default_rng(11)
        d, delta, runs = 3, 0.1, 200
        covered = 0
        for _ in range(runs):
            theta = rng.standard_normal(d)
            theta /= np.linalg.norm(theta)
            est = RegularizedLeastSquares.scaled_identity(d, 1.0)
            for x in _unit_rows(rng, 100, d):
                est.update(x, x @ theta + rng.standard_normal())
            covered += est.contains(theta, est.confidence_radius(delta, 1.0, 1.0, 1.0))
        assert covered / runs >= 1.0 - delta

    def test_dimension_mismatch(self):
        est = RegularizedLeastSquares.scaled_identity(2, 1.0)
        with pytest.raises(UsageError):
            est.contains([1.0, 0.0, 0.0], 1.0)
