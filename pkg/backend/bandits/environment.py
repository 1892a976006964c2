"""
Stochastic linear bandit environment.

A hidden parameter ``theta_star`` with ``||theta_star|| <= S`` and a
centered sub-Gaussian noise model. Playing an action ``x`` in the unit
ball returns ``<x, theta_star> + eta``.

Environments are immutable and can be shared between trials. Randomness
always comes from a ``numpy.random.Generator`` owned by the caller, so one
generator per trial gives reproducible, independent reward streams.
"""
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _
from numpy.typing import ArrayLike

from bandits.exceptions import DomainError, UsageError
from bandits.linalg import Vector, as_vector


UNIT_BALL_TOL = 1e-12


class NoiseKind(models.TextChoices):
    """
    Noise distributions with variance proxy sigma^2.

    GAUSSIAN: N(0, sigma^2)
    BOUNDED_UNIFORM: Uniform on [-sigma*sqrt(3), sigma*sqrt(3)], variance sigma^2
    """
    GAUSSIAN = 'gaussian', _('Gaussian')
    BOUNDED_UNIFORM = 'bounded-uniform', _('Bounded uniform')


@dataclass(frozen=True)
class NoiseModel:
    """
    Centered sub-Gaussian noise.

    Attributes:
        kind: Distribution family
        sigma: Scale; both families have variance sigma^2. ``sigma=0`` gives
            a noiseless environment.
    """
    kind: str = NoiseKind.GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in NoiseKind.values:
            raise UsageError(
                f'Unsupported noise kind: {self.kind}. '
                f'Supported kinds: {", ".join(NoiseKind.values)}'
            )
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise UsageError(f'sigma must be a finite non-negative number, got {self.sigma}.')

    def sample(
        self,
        rng: np.random.Generator,
        size: Optional[int] = None,
    ) -> Union[float, np.ndarray]:
        """
        Draw noise values.

        Args:
            rng: Generator to draw from
            size: Number of draws, or None for a single float

        Returns:
            Union[float, np.ndarray]: One draw or an array of ``size`` draws
        """
        if self.kind == NoiseKind.GAUSSIAN:
            draw = rng.normal(0.0, self.sigma, size)
        else:
            half_width = self.sigma * np.sqrt(3.0)
            draw = rng.uniform(-half_width, half_width, size)
        return float(draw) if size is None else draw


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    """
    A stochastic linear bandit instance.

    Attributes:
        theta_star: Hidden parameter (read-only array)
        S: Norm bound, ``||theta_star||_2 <= S``
        noise: Reward noise model
    """
    theta_star: Vector
    S: float
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self) -> None:
        theta = as_vector(self.theta_star, 'theta_star')
        theta.setflags(write=False)
        object.__setattr__(self, 'theta_star', theta)
        if not np.isfinite(self.S) or self.S <= 0:
            raise UsageError(f'S must be positive, got {self.S}.')
        norm = float(np.linalg.norm(theta))
        if norm > self.S * (1.0 + UNIT_BALL_TOL):
            raise UsageError(f'||theta_star|| = {norm} exceeds the norm bound S = {self.S}.')

    @property
    def d(self) -> int:
        """Dimension of the action and parameter space."""
        return int(self.theta_star.shape[0])

    @property
    def optimal_reward(self) -> float:
        """Expected reward of the best action ``theta_star / ||theta_star||``."""
        return float(np.linalg.norm(self.theta_star))


def sample_theta(d: int, S: float, rng: np.random.Generator) -> Vector:
    """
    Draw a parameter uniformly on the sphere of radius ``S``.

    Args:
        d: Dimension, d >= 1
        S: Radius, S > 0
        rng: Generator to draw from

    Returns:
        Vector: ``theta`` with ``||theta||_2 = S``

    Raises:
        UsageError: If ``d < 1`` or ``S <= 0``
    """
    if int(d) != d or d < 1:
        raise UsageError(f'd must be a positive integer, got {d}.')
    if not np.isfinite(S) or S <= 0:
        raise UsageError(f'S must be positive, got {S}.')
    while True:
        z = rng.standard_normal(int(d))
        norm = np.linalg.norm(z)
        if norm > 0.0:
            return S * z / norm


def check_action(x: ArrayLike, d: int) -> Vector:
    """
    Validate an action against the unit-ball decision set.

    Args:
        x: Candidate action
        d: Expected dimension

    Returns:
        Vector: The action as a float vector

    Raises:
        UsageError: If the dimension is wrong
        DomainError: If ``||x||_2 > 1``
    """
    vec = as_vector(x, 'x')
    if vec.shape[0] != d:
        raise UsageError(f'Dimension mismatch: action has dimension {vec.shape[0]}, expected {d}.')
    if np.dot(vec, vec) > (1.0 + UNIT_BALL_TOL) ** 2:
        raise DomainError(f'Action lies outside the unit ball: ||x|| = {np.linalg.norm(vec)}.')
    return vec


def reward(x: ArrayLike, env: EnvironmentSpec, rng: np.random.Generator) -> float:
    """
    Play action ``x`` and return ``<x, theta_star> + eta``.

    Args:
        x: Action in the unit ball
        env: Environment instance
        rng: Generator supplying the noise draw

    Returns:
        float: Observed reward

    Raises:
        UsageError: If the dimension is wrong
        DomainError: If ``x`` lies outside the unit ball
    """
    vec = check_action(x, env.d)
    return float(vec @ env.theta_star) + env.noise.sample(rng)
