"""
Action-selection policies and the episode runner.

Three policies act on the unit sphere of R^d:

- ``ofu``: optimism in the face of uncertainty. With the unit ball as the
  decision set, maximizing the optimistic reward reduces to playing the
  current estimate's direction, re-estimated after every reward.
- ``orth-batch``: plays orthonormal batches of d actions. Each batch starts
  with the direction of the estimate that planned it and completes it to an
  orthonormal basis; the estimate is refreshed only when a batch completes.
  The first batch is the standard basis.
- ``random``: uniform directions on the sphere, a baseline.

All three share the regularized least-squares estimator.
"""
import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Deque, Iterator, NamedTuple, Optional

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _
from numpy.typing import ArrayLike

from bandits.environment import EnvironmentSpec, reward
from bandits.estimator import RegularizedLeastSquares
from bandits.exceptions import UsageError
from bandits.linalg import Matrix, Vector, as_vector, complete_orthonormal_basis


logger = logging.getLogger(__name__)


class PolicyKind(models.TextChoices):
    """
    Supported action-selection policies.

    OFU: Play the direction of the current estimate
    ORTH_BATCH: Orthonormal batches aligned with the last batch estimate
    RANDOM: Uniform random directions
    """
    OFU = 'ofu', _('Optimism in the face of uncertainty')
    ORTH_BATCH = 'orth-batch', _('Orthonormal batch')
    RANDOM = 'random', _('Uniform random')


@dataclass(frozen=True)
class RadiusSettings:
    """
    Parameters of the OFU confidence radius, computed each round for logging.

    Attributes:
        delta: Failure probability
        sigma: Noise scale
        S: Norm bound on the parameter
        kappa: Regularizer scale (requires ``W0 = kappa * I``)
        literal: Use ``sigma^2`` as the leading factor
    """
    delta: float
    sigma: float
    S: float
    kappa: float
    literal: bool = False


def ofu_select(theta_hat: ArrayLike) -> Vector:
    """
    Maximizer of ``<x, theta_hat>`` over the unit ball.

    Args:
        theta_hat: Current estimate

    Returns:
        Vector: ``theta_hat / ||theta_hat||``, or ``e_1`` when the estimate is zero
    """
    vec = as_vector(theta_hat, 'theta_hat')
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        action = np.zeros(vec.shape[0])
        action[0] = 1.0
        return action
    return vec / norm


def orth_batch_plan(theta_hat: ArrayLike, d: int) -> Matrix:
    """
    Plan one orthonormal batch of d actions.

    Args:
        theta_hat: Estimate the batch is aligned with
        d: Dimension

    Returns:
        Matrix: d x d matrix whose rows are the actions, in serving order.
            The first row is ``theta_hat / ||theta_hat||``; a zero estimate
            yields the standard basis.

    Raises:
        UsageError: If ``theta_hat`` does not have dimension d
    """
    vec = as_vector(theta_hat, 'theta_hat')
    if vec.shape[0] != d:
        raise UsageError(f'Dimension mismatch: theta_hat has dimension {vec.shape[0]}, expected {d}.')
    if not np.any(vec):
        return np.eye(d)
    return complete_orthonormal_basis(vec)


class Policy(ABC):
    """
    Base class for policies sharing one regularized least-squares estimator.

    Attributes:
        kind: Policy identifier
        est: Estimator fed with every reward
        round: Number of rewards observed
        theta_hat: Latest estimate snapshot exposed to callers
    """

    kind: str = ''

    def __init__(self, d: int, W0: ArrayLike):
        self.est = RegularizedLeastSquares(W0)
        if self.est.d != d:
            raise UsageError(f'W0 is {self.est.d}x{self.est.d} but d = {d}.')
        self.d = d
        self.round = 0
        self.theta_hat: Vector = np.zeros(d)

    def __repr__(self) -> str:
        return f'<{type(self).__name__}: d={self.d} round={self.round}>'

    @abstractmethod
    def select(self) -> Vector:
        """Return the next action (unit norm)."""

    def observe(self, x: Vector, y: float) -> None:
        """
        Feed one (action, reward) pair to the estimator.

        Args:
            x: Action that was played
            y: Observed reward
        """
        self.est.update(x, y)
        self.round += 1
        self._refresh()

    def _refresh(self) -> None:
        self.theta_hat = self.est.estimate()


class OFUPolicy(Policy):
    """
    Optimistic policy: always plays the direction of the newest estimate.

    When ``radius`` is given, ``beta_t`` is recomputed after every reward and
    kept in ``self.beta`` for logging and verification. It does not change the
    chosen action, since over the unit ball the optimistic action is the
    estimate's direction.
    """

    kind = PolicyKind.OFU

    def __init__(self, d: int, W0: ArrayLike, radius: Optional[RadiusSettings] = None):
        super().__init__(d, W0)
        self.radius = radius
        self.beta: Optional[float] = None
        if radius is not None:
            self.beta = self._beta()

    def _beta(self) -> float:
        r = self.radius
        return self.est.confidence_radius(r.delta, r.sigma, r.S, r.kappa, literal=r.literal)

    def select(self) -> Vector:
        return ofu_select(self.theta_hat)

    def _refresh(self) -> None:
        super()._refresh()
        if self.radius is not None:
            self.beta = self._beta()
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug(
                    'ofu round=%d beta=%.6g |theta_hat|=%.6g',
                    self.round, self.beta, np.linalg.norm(self.theta_hat),
                )


class OrthBatchPolicy(Policy):
    """
    Orthonormal-batch policy.

    Attributes:
        pending: Unserved remainder of the current batch
        planned_from: Estimate the current batch was planned from
    """

    kind = PolicyKind.ORTH_BATCH

    def __init__(self, d: int, W0: ArrayLike):
        super().__init__(d, W0)
        self.pending: Deque[Vector] = deque()
        self.planned_from: Vector = np.zeros(d)

    def select(self) -> Vector:
        if not self.pending:
            self.planned_from = self.theta_hat.copy()
            self.pending.extend(orth_batch_plan(self.planned_from, self.d))
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug(
                    'orth-batch replan at round=%d |theta_hat|=%.6g',
                    self.round + 1, np.linalg.norm(self.planned_from),
                )
        return self.pending.popleft()

    def _refresh(self) -> None:
        # snapshot only at completed batches
        if self.round % self.d == 0:
            super()._refresh()


class RandomPolicy(Policy):
    """Uniformly random unit directions; re-estimates after every reward."""

    kind = PolicyKind.RANDOM

    def __init__(self, d: int, W0: ArrayLike, rng: np.random.Generator):
        super().__init__(d, W0)
        self.rng = rng

    def select(self) -> Vector:
        while True:
            z = self.rng.standard_normal(self.d)
            norm = np.linalg.norm(z)
            if norm > 0.0:
                return z / norm


def make_policy(
    kind: str,
    d: int,
    W0: ArrayLike,
    rng: Optional[np.random.Generator] = None,
    radius: Optional[RadiusSettings] = None,
) -> Policy:
    """
    Build a policy by kind.

    Args:
        kind: One of ``ofu``, ``orth-batch``, ``random``
        d: Dimension
        W0: Regularizer for the estimator
        rng: Action generator (required by ``random``)
        radius: Confidence radius settings (used by ``ofu``)

    Returns:
        Policy: Fresh policy state

    Raises:
        UsageError: If the kind is not supported
    """
    if kind == PolicyKind.OFU:
        return OFUPolicy(d, W0, radius=radius)
    elif kind == PolicyKind.ORTH_BATCH:
        return OrthBatchPolicy(d, W0)
    elif kind == PolicyKind.RANDOM:
        if rng is None:
            raise UsageError('The random policy requires an action generator.')
        return RandomPolicy(d, W0, rng)
    else:
        raise UsageError(
            f'Unsupported policy: {kind}. '
            f'Supported policies: {", ".join(PolicyKind.values)}'
        )


class TrajectoryRecord(NamedTuple):
    """One round of an episode."""
    round: int
    action: Vector
    reward: float
    theta_hat: Vector


@dataclass(eq=False)
class Trajectory:
    """
    Recorded episode, rounds ``1..T``.

    Attributes:
        policy: Policy kind that produced it
        actions: T x d actions
        rewards: T rewards
        theta_hats: T x d estimate snapshots taken after each round's update
        betas: T confidence radii (OFU with radius settings only)
    """
    policy: str
    actions: Matrix
    rewards: Vector
    theta_hats: Matrix
    betas: Optional[Vector] = None

    def __len__(self) -> int:
        return int(self.rewards.shape[0])

    @property
    def rounds(self) -> np.ndarray:
        """Round numbers ``1..T``."""
        return np.arange(1, len(self) + 1)

    def records(self) -> Iterator[TrajectoryRecord]:
        """Iterate over rounds in order."""
        for i in range(len(self)):
            yield TrajectoryRecord(i + 1, self.actions[i], float(self.rewards[i]), self.theta_hats[i])


def run_episode(
    policy_kind: str,
    env: EnvironmentSpec,
    T: int,
    W0: ArrayLike,
    rng: np.random.Generator,
    action_rng: Optional[np.random.Generator] = None,
    radius: Optional[RadiusSettings] = None,
) -> Trajectory:
    """
    Play ``T`` rounds: select, observe the reward, update the estimator.

    Args:
        policy_kind: One of ``ofu``, ``orth-batch``, ``random``
        env: Environment to play against
        T: Number of rounds, T >= 1
        W0: Regularizer for the estimator
        rng: Noise generator; one draw per round
        action_rng: Generator for randomized actions; defaults to ``rng``
        radius: OFU confidence radius settings

    Returns:
        Trajectory: All T rounds

    Raises:
        UsageError: On invalid parameters
    """
    if int(T) != T or T < 1:
        raise UsageError(f'T must be a positive integer, got {T}.')
    T = int(T)
    d = env.d
    policy = make_policy(policy_kind, d, W0, rng=action_rng or rng, radius=radius)

    actions = np.empty((T, d))
    rewards = np.empty(T)
    theta_hats = np.empty((T, d))
    betas = np.empty(T) if isinstance(policy, OFUPolicy) and radius is not None else None

    for i in range(T):
        x = policy.select()
        y = reward(x, env, rng)
        policy.observe(x, y)
        actions[i] = x
        rewards[i] = y
        theta_hats[i] = policy.theta_hat
        if betas is not None:
            betas[i] = policy.beta

    return Trajectory(str(policy.kind), actions, rewards, theta_hats, betas)


def replay_trajectory(traj: Trajectory, W0: ArrayLike, refresh_every: int = 1) -> Matrix:
    """
    Rebuild estimate snapshots from a recorded trajectory.

    Args:
        traj: Recorded episode
        W0: Regularizer used when it was recorded
        refresh_every: Snapshot period; 1 for ``ofu``/``random``, d for ``orth-batch``

    Returns:
        Matrix: T x d snapshots, identical to ``traj.theta_hats`` when the
            same regularizer and period are used
    """
    if refresh_every < 1:
        raise UsageError(f'refresh_every must be >= 1, got {refresh_every}.')
    est = RegularizedLeastSquares(W0)
    snapshots = np.empty_like(traj.theta_hats)
    current = np.zeros(est.d)
    for record in traj.records():
        est.update(record.action, record.reward)
        if est.t % refresh_every == 0:
            current = est.estimate()
        snapshots[record.round - 1] = current
    return snapshots
