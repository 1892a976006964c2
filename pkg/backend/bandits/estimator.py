"""
Regularized least-squares estimator with recursive state.

The estimate after t rewards is

    theta_hat_t = (W_0 + X_t^T X_t)^{-1} X_t^T Y_t

and is maintained recursively through ``W_t = W_{t-1} + x_t x_t^T`` and
``s_t = s_{t-1} + x_t y_t``. The solve is done on demand with a Cholesky
factorization. ``log det W_t`` is tracked with the rank-one identity
``det(W + x x^T) = det(W) (1 + x^T W^{-1} x)`` so the confidence radius never
forms a determinant directly.
"""
import logging

import numpy as np
from numpy.typing import ArrayLike

from bandits.exceptions import UsageError
from bandits.linalg import Matrix, Vector, as_vector, log_det_pd, pd_factor, solve_pd, weighted_norm


logger = logging.getLogger(__name__)


class RegularizedLeastSquares:
    """
    Recursive state of the regularized least-squares estimator.

    Attributes:
        W: Gram matrix ``W_0 + sum x_i x_i^T``
        s: Moment accumulator ``sum x_i y_i``
        W0: Regularizer (positive definite)
        t: Number of updates since construction
        log_det_W0: Cached ``log det W_0``
        log_det_W: Running ``log det W``
    """

    def __init__(self, W0: ArrayLike):
        """
        Initialize the estimator from a positive definite regularizer.

        Args:
            W0: d x d symmetric positive definite matrix

        Raises:
            DomainError: If ``W0`` is not positive definite
        """
        c, _ = pd_factor(W0, 'W0')
        self.W0: Matrix = np.array(W0, dtype=float)
        self.W: Matrix = self.W0.copy()
        self.s: Vector = np.zeros(self.W0.shape[0])
        self.t = 0
        self.log_det_W0 = float(2.0 * np.sum(np.log(np.diag(c))))
        self.log_det_W = self.log_det_W0

    @classmethod
    def scaled_identity(cls, d: int, kappa: float) -> 'RegularizedLeastSquares':
        """
        Build an estimator with ``W_0 = kappa * I``.

        Args:
            d: Dimension
            kappa: Regularizer scale, > 0

        Returns:
            RegularizedLeastSquares: Fresh estimator
        """
        if d < 1:
            raise UsageError(f'd must be a positive integer, got {d}.')
        if not np.isfinite(kappa) or kappa <= 0:
            raise UsageError(f'kappa must be positive, got {kappa}.')
        return cls(kappa * np.eye(d))

    @property
    def d(self) -> int:
        """Dimension of the parameter space."""
        return int(self.W0.shape[0])

    def __repr__(self) -> str:
        return f'<RegularizedLeastSquares: d={self.d} t={self.t}>'

    def update(self, x: ArrayLike, y: float) -> 'RegularizedLeastSquares':
        """
        Ingest one (action, reward) pair.

        Args:
            x: Action of dimension d
            y: Observed reward

        Returns:
            RegularizedLeastSquares: ``self``, for chaining

        Raises:
            UsageError: If the dimension of ``x`` is wrong
        """
        vec = np.asarray(x, dtype=float)
        if vec.ndim != 1 or vec.shape[0] != self.d:
            raise UsageError(
                f'Dimension mismatch: action has shape {vec.shape}, estimator dimension is {self.d}.'
            )
        self.log_det_W += float(np.log1p(vec @ solve_pd(self.W, vec, check=False)))
        self.W += np.outer(vec, vec)
        self.s += float(y) * vec
        self.t += 1
        return self

    def estimate(self) -> Vector:
        """
        Current estimate ``theta_hat = W^{-1} s``.

        Returns:
            Vector: The estimate; zero before any update
        """
        if self.t == 0:
            return np.zeros(self.d)
        return solve_pd(self.W, self.s, check=False)

    def log_det_W_exact(self) -> float:
        """``log det W`` recomputed from a fresh factorization."""
        return log_det_pd(self.W, 'W')

    def _check_scaled_identity(self, kappa: float) -> None:
        target = kappa * np.eye(self.d)
        if np.any(np.abs(self.W0 - target) > 1e-12 * max(1.0, abs(kappa))):
            raise UsageError(
                f'confidence_radius requires W0 = kappa * I with kappa = {kappa}.'
            )

    def confidence_radius(
        self,
        delta: float,
        sigma: float,
        S: float,
        kappa: float,
        literal: bool = False,
    ) -> float:
        """
        Radius ``beta_t`` of the confidence ellipsoid around the estimate.

        ``beta_t = sigma * sqrt(2 log(det(W_t)^{1/2} det(kappa I)^{-1/2} / delta)) + sqrt(kappa) S``

        With ``literal=True`` the leading factor is ``sigma^2`` instead of
        ``sigma``, the form used inside ``ofu_regret_bound``.

        Args:
            delta: Failure probability, 0 < delta < 1
            sigma: Noise scale
            S: Norm bound on the parameter
            kappa: Regularizer scale; ``W0`` must equal ``kappa * I``
            literal: Use ``sigma^2`` as the leading factor

        Returns:
            float: The radius

        Raises:
            UsageError: If ``delta`` is outside (0, 1) or ``W0`` is not ``kappa * I``
        """
        if not 0.0 < delta < 1.0:
            raise UsageError(f'delta must lie in (0, 1), got {delta}.')
        if sigma < 0 or S < 0:
            raise UsageError('sigma and S must be non-negative.')
        self._check_scaled_identity(kappa)
        log_ratio = 0.5 * (self.log_det_W - self.log_det_W0)
        scale = sigma ** 2 if literal else sigma
        return float(scale * np.sqrt(2.0 * (log_ratio - np.log(delta))) + np.sqrt(kappa) * S)

    def contains(self, theta: ArrayLike, beta: float) -> bool:
        """
        Whether ``theta`` lies in the ellipsoid ``||theta_hat - theta||_W <= beta``.

        Args:
            theta: Candidate parameter
            beta: Ellipsoid radius

        Returns:
            bool: True if ``theta`` is inside
        """
        vec = as_vector(theta, 'theta')
        if vec.shape[0] != self.d:
            raise UsageError(f'Dimension mismatch: theta has dimension {vec.shape[0]}, expected {self.d}.')
        return weighted_norm(self.estimate() - vec, self.W) <= beta
