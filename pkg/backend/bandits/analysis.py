"""
Metrics and closed-form bound evaluators.

Metrics: instantaneous and cumulative regret, squared estimation error.

Bounds, evaluated exactly as their finite-t closed forms:
- OFU cumulative regret bound (requires ``W0 = kappa * I``)
- OFU estimation-error floor ``sigma^2 (1 - delta)``
- Orthonormal-batch MSE upper bound and high-probability tail threshold
- MSE lower bound for any adaptive design with the regularized estimator
- Quadratic-form concentration threshold for sub-Gaussian vectors

Headline asymptotic forms are exposed separately for plotting.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from bandits.exceptions import UsageError
from bandits.linalg import Matrix, Vector, as_symmetric, as_vector, is_positive_definite
from bandits.policies import Trajectory


@dataclass(frozen=True, eq=False)
class BoundParams:
    """
    Parameters shared by the bound evaluators.

    Attributes:
        t: Rounds, t >= 1
        d: Dimension, d >= 1
        sigma: Noise scale, >= 0
        kappa: Regularizer scale, > 0 (``W0 = kappa * I`` unless ``W0`` is given)
        S: Norm bound; stands in for ``||theta_star||`` when ``theta_star`` is None
        delta: Failure probability in (0, 1)
        theta_star: Parameter, optional
        W0: Full regularizer, optional
    """
    t: float
    d: int
    sigma: float = 1.0
    kappa: float = 1.0
    S: float = 1.0
    delta: float = 0.1
    theta_star: Optional[Vector] = None
    W0: Optional[Matrix] = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise UsageError(f't must be >= 1, got {self.t}.')
        if int(self.d) != self.d or self.d < 1:
            raise UsageError(f'd must be a positive integer, got {self.d}.')
        if self.sigma < 0:
            raise UsageError(f'sigma must be non-negative, got {self.sigma}.')
        if self.kappa <= 0:
            raise UsageError(f'kappa must be positive, got {self.kappa}.')
        if self.S < 0:
            raise UsageError(f'S must be non-negative, got {self.S}.')
        if not 0.0 < self.delta < 1.0:
            raise UsageError(f'delta must lie in (0, 1), got {self.delta}.')
        if self.theta_star is not None:
            theta = as_vector(self.theta_star, 'theta_star')
            if theta.shape[0] != self.d:
                raise UsageError(f'theta_star has dimension {theta.shape[0]}, expected {self.d}.')
            object.__setattr__(self, 'theta_star', theta)
        if self.W0 is not None:
            W0 = as_symmetric(self.W0, 'W0')
            if W0.shape[0] != self.d:
                raise UsageError(f'W0 is {W0.shape[0]}x{W0.shape[0]}, expected {self.d}.')
            if not is_positive_definite(W0):
                raise UsageError('W0 must be symmetric positive definite.')
            object.__setattr__(self, 'W0', W0)

    def with_t(self, t: float) -> 'BoundParams':
        """Copy with a different round count."""
        return BoundParams(t, self.d, self.sigma, self.kappa, self.S, self.delta, self.theta_star, self.W0)

    @property
    def regularizer(self) -> Matrix:
        """``W0``, defaulting to ``kappa * I``."""
        return self.W0 if self.W0 is not None else self.kappa * np.eye(self.d)

    @property
    def theta_norm(self) -> float:
        """``||theta_star||``, or ``S`` when the parameter is not given."""
        if self.theta_star is None:
            return float(self.S)
        return float(np.linalg.norm(self.theta_star))

    @property
    def bias_energy(self) -> float:
        """
        ``theta_star^T W0^2 theta_star``.

        Without ``theta_star`` this is ``kappa^2 S^2``, exact for
        ``||theta_star|| = S`` and ``W0 = kappa * I``.

        Raises:
            UsageError: If ``W0`` is given without ``theta_star``
        """
        if self.theta_star is None:
            if self.W0 is not None:
                raise UsageError('theta_star is required with a general W0.')
            return float((self.kappa * self.S) ** 2)
        w_theta = self.regularizer @ self.theta_star
        return float(w_theta @ w_theta)


# Metrics

def instantaneous_regret(x: ArrayLike, theta_star: ArrayLike) -> float:
    """
    Reward gap ``||theta_star|| - <x, theta_star>`` of action ``x``.

    Args:
        x: Action in the unit ball
        theta_star: Parameter

    Returns:
        float: Non-negative regret
    """
    theta = as_vector(theta_star, 'theta_star')
    vec = as_vector(x, 'x')
    if vec.shape != theta.shape:
        raise UsageError(f'Dimension mismatch: x {vec.shape} vs theta_star {theta.shape}.')
    return max(0.0, float(np.linalg.norm(theta) - vec @ theta))


def cumulative_regret(traj: Union[Trajectory, ArrayLike], theta_star: ArrayLike) -> Vector:
    """
    Prefix sums ``R_n`` of the instantaneous regret, n = 1..T.

    Args:
        traj: Trajectory, or a T x d array of actions
        theta_star: Parameter

    Returns:
        Vector: Non-decreasing array of length T

    Raises:
        UsageError: If the trajectory is empty or dimensions do not match
    """
    actions = traj.actions if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    theta = as_vector(theta_star, 'theta_star')
    if actions.ndim != 2 or actions.shape[0] == 0:
        raise UsageError('cumulative_regret needs a non-empty trajectory.')
    if actions.shape[1] != theta.shape[0]:
        raise UsageError(f'Dimension mismatch: actions have dimension {actions.shape[1]}, theta_star {theta.shape[0]}.')
    gaps = np.maximum(0.0, np.linalg.norm(theta) - actions @ theta)
    return np.cumsum(gaps)


def squared_error(theta_hat: ArrayLike, theta_star: ArrayLike) -> float:
    """
    ``||theta_hat - theta_star||_2^2``.

    Raises:
        UsageError: If dimensions do not match
    """
    a = as_vector(theta_hat, 'theta_hat')
    b = as_vector(theta_star, 'theta_star')
    if a.shape != b.shape:
        raise UsageError(f'Dimension mismatch: theta_hat {a.shape} vs theta_star {b.shape}.')
    diff = a - b
    return float(diff @ diff)


# OFU

def ofu_regret_bound(params: BoundParams, n: float) -> float:
    """
    High-probability cumulative regret bound of OFU after ``n`` rounds.

    ``4 sqrt(n d log(kappa + n/d)) (sqrt(kappa) S + sigma^2 sqrt(2 log(1/delta) + d log(1 + n/(kappa d))))``

    Evaluated as printed, including ``sigma^2``. A negative logarithm under
    the first root (``kappa < 1`` with tiny ``n``) is clipped to zero.

    Args:
        params: Bound parameters; ``W0`` must be ``kappa * I``
        n: Rounds, n >= 0

    Returns:
        float: The bound

    Raises:
        UsageError: If ``n < 0`` or a general ``W0`` was given
    """
    if n < 0:
        raise UsageError(f'n must be non-negative, got {n}.')
    if params.W0 is not None and not np.allclose(params.W0, params.kappa * np.eye(params.d), rtol=0, atol=1e-12):
        raise UsageError('ofu_regret_bound requires W0 = kappa * I.')
    d, kappa, sigma = params.d, params.kappa, params.sigma
    if n == 0:
        return 0.0
    lead = 4.0 * np.sqrt(max(0.0, n * d * np.log(kappa + n / d)))
    radius = np.sqrt(kappa) * params.S + sigma ** 2 * np.sqrt(
        2.0 * np.log(1.0 / params.delta) + d * np.log(1.0 + n / (kappa * d))
    )
    return float(lead * radius)


def ofu_inconsistency_floor(sigma: float, delta: float) -> float:
    """
    Lower bound ``sigma^2 (1 - delta)`` on the limiting OFU mean squared error.

    Args:
        sigma: Noise scale
        delta: Probability that the regret guarantee fails, in [0, 1]

    Returns:
        float: The floor
    """
    if not 0.0 <= delta <= 1.0:
        raise UsageError(f'delta must lie in [0, 1], got {delta}.')
    return float(sigma ** 2 * (1.0 - delta))


# Orthonormal batches

def mse_upper_bound(params: BoundParams) -> float:
    """
    Orthonormal-batch MSE bound ``(d^2/t^2) theta^T W0^2 theta + (d^2/t) sigma^2``.

    ``l = t/d`` is treated as a real number, so any t >= 1 is accepted.
    """
    t, d = float(params.t), params.d
    return float(d ** 2 / t ** 2 * params.bias_energy + d ** 2 / t * params.sigma ** 2)


def mse_upper_bound_asymptotic(params: BoundParams) -> float:
    """Leading term ``d^2 sigma^2 / t`` of the orthonormal-batch MSE bound."""
    return float(params.d ** 2 * params.sigma ** 2 / params.t)


def mse_tail_threshold(params: BoundParams) -> float:
    """
    Squared-error level exceeded with probability at most ``exp(-t)``.

    With ``A = d^2/t + 3 sqrt(d^3/t)``::

        (d^2/t^2) theta^T W0^2 theta + sigma^2 A
            + lambda_max(W0) ||theta|| (d sigma^2 / t) sqrt(A)
    """
    t, d, sigma2 = float(params.t), params.d, params.sigma ** 2
    spread = d ** 2 / t + 3.0 * np.sqrt(d ** 3 / t)
    lam_max = float(np.linalg.eigvalsh(params.regularizer)[-1])
    return float(
        d ** 2 / t ** 2 * params.bias_energy
        + sigma2 * spread
        + lam_max * params.theta_norm * (d * sigma2 / t) * np.sqrt(spread)
    )


def mse_tail_headline(params: BoundParams) -> float:
    """Leading term ``3 sigma^2 d^{3/2} / sqrt(t)`` of the tail threshold."""
    return float(3.0 * params.sigma ** 2 * params.d ** 1.5 / np.sqrt(params.t))


def orth_batch_exact_mse(d: int, l: int, sigma: float, kappa: float, theta_norm: float) -> float:
    """
    Exact expected squared error after ``l`` complete orthonormal batches with ``W0 = kappa * I``.

    ``kappa^2 ||theta||^2 / (kappa + l)^2 + d l sigma^2 / (kappa + l)^2``
    """
    if l < 0 or kappa <= 0:
        raise UsageError('orth_batch_exact_mse needs l >= 0 and kappa > 0.')
    denom = (kappa + l) ** 2
    return float((kappa * theta_norm) ** 2 / denom + d * l * sigma ** 2 / denom)


# Lower bound

def mse_lower_bound(params: BoundParams) -> float:
    """
    MSE lower bound for any adaptive design: ``(theta^T W0^2 theta + t sigma^2) / (trace(W0) + t)^2``.
    """
    t = float(params.t)
    trace = float(np.trace(params.regularizer))
    return float((params.bias_energy + t * params.sigma ** 2) / (trace + t) ** 2)


def mse_lower_bound_asymptotic(params: BoundParams) -> float:
    """Asymptotic lower bound ``sigma^2 / t``."""
    return float(params.sigma ** 2 / params.t)


# Concentration

def hsu_threshold(trA: float, trA2: float, opnorm: float, sigma: float, u: float) -> float:
    """
    Quadratic-form concentration threshold for a sub-Gaussian vector.

    ``sigma^2 (trA + 2 sqrt(trA2 u) + opnorm u)``; the quadratic form exceeds
    it with probability at most ``exp(-u)``.

    Args:
        trA: ``trace(A^T A)``
        trA2: ``trace((A^T A)^2)``
        opnorm: Operator-norm term
        sigma: Noise scale
        u: Tail parameter

    Returns:
        float: The threshold

    Raises:
        UsageError: If any input is negative
    """
    if min(trA, trA2, opnorm, sigma, u) < 0:
        raise UsageError('hsu_threshold inputs must be non-negative.')
    return float(sigma ** 2 * (trA + 2.0 * np.sqrt(trA2 * u) + opnorm * u))


def design_matrix_moments(X: ArrayLike) -> Tuple[float, float, float]:
    """
    Concentration inputs of a t x d design matrix.

    Returns:
        Tuple[float, float, float]: ``trace(X^T X)``, ``trace((X^T X)^2)`` and
            ``||X||_2 = lambda_max(X^T X)^{1/2}``
    """
    mat = np.asarray(X, dtype=float)
    if mat.ndim != 2:
        raise UsageError(f'X must be a matrix, got shape {mat.shape}.')
    gram = mat.T @ mat
    lam_max = float(np.linalg.eigvalsh(gram)[-1])
    return float(np.trace(gram)), float(np.sum(gram * gram)), float(np.sqrt(max(0.0, lam_max)))


def orth_batch_moments(l: int, d: int) -> Tuple[float, float, float]:
    """Concentration inputs after ``l`` orthonormal batches: ``(l d, l^2 d, sqrt(l))``."""
    if l < 0 or d < 1:
        raise UsageError('orth_batch_moments needs l >= 0 and d >= 1.')
    return float(l * d), float(l * l * d), float(np.sqrt(l))
