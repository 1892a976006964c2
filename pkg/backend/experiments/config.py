"""
Experiment configuration.

An ``ExperimentConfig`` fully describes one Monte Carlo run. Together with
its seed it determines every emitted byte, whatever the worker count.

Configs are assembled from three layers, later layers winning:
settings defaults, an optional JSON config file, command-line flags.
"""
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from bandits.environment import NoiseKind
from bandits.exceptions import UsageError
from bandits.policies import PolicyKind


class ThetaMode(models.TextChoices):
    """
    How the hidden parameter is drawn.

    RESAMPLE: A fresh parameter for every trial
    FIXED: One parameter shared by all trials
    """
    RESAMPLE = 'resample-per-trial', _('Resample per trial')
    FIXED = 'fixed', _('Fixed')


MAX_SEED = 2 ** 64 - 1


def _is_int(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value: Any) -> bool:
    return isinstance(value, (int, float, np.number)) and not isinstance(value, bool) and bool(np.isfinite(value))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Full description of one experiment.

    Attributes:
        dim: Dimension d
        rounds: Rounds per trial T
        trials: Number of trials
        policies: Policies to run, in output order
        sigma: Noise scale
        kappa: Regularizer scale, ``W0 = kappa * I``
        theta_norm: ``||theta_star|| = S``
        theta_mode: ``resample-per-trial`` or ``fixed``
        seed: Master seed (64-bit, non-negative)
        record_every: Recording stride
        beta_literal: Use ``sigma^2`` in the OFU confidence radius
        shared_noise: Give all policies the same noise stream per trial
        delta: Failure probability for radii and bound curves
        noise: Noise family
    """
    dim: int = 5
    rounds: int = 3000
    trials: int = 1000
    policies: Tuple[str, ...] = (PolicyKind.OFU, PolicyKind.ORTH_BATCH)
    sigma: float = 1.0
    kappa: float = 1.0
    theta_norm: float = 1.0
    theta_mode: str = ThetaMode.RESAMPLE
    seed: int = 0
    record_every: int = 10
    beta_literal: bool = False
    shared_noise: bool = False
    delta: float = 0.1
    noise: str = NoiseKind.GAUSSIAN

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """
        Check every field.

        Raises:
            UsageError: Naming the first invalid field
        """
        for name in ('dim', 'rounds', 'trials', 'record_every'):
            value = getattr(self, name)
            if not _is_int(value) or value < 1:
                raise UsageError(f'{name} must be a positive integer, got {value!r}.')
        if not _is_int(self.seed) or not 0 <= self.seed <= MAX_SEED:
            raise UsageError(f'seed must be an integer in [0, 2^64), got {self.seed!r}.')
        for name in ('kappa', 'theta_norm'):
            value = getattr(self, name)
            if not _is_real(value) or value <= 0:
                raise UsageError(f'{name} must be a positive number, got {value!r}.')
        if not _is_real(self.sigma) or self.sigma < 0:
            raise UsageError(f'sigma must be a non-negative number, got {self.sigma!r}.')
        if not _is_real(self.delta) or not 0.0 < self.delta < 1.0:
            raise UsageError(f'delta must lie in (0, 1), got {self.delta!r}.')
        for name in ('beta_literal', 'shared_noise'):
            if not isinstance(getattr(self, name), bool):
                raise UsageError(f'{name} must be true or false, got {getattr(self, name)!r}.')
        if not self.policies:
            raise UsageError('policies must name at least one policy.')
        for policy in self.policies:
            if policy not in PolicyKind.values:
                raise UsageError(
                    f'policies: unsupported policy {policy!r}. '
                    f'Supported policies: {", ".join(PolicyKind.values)}'
                )
        if len(set(self.policies)) != len(self.policies):
            raise UsageError('policies must not repeat a policy.')
        if self.theta_mode not in ThetaMode.values:
            raise UsageError(
                f'theta_mode must be one of {", ".join(ThetaMode.values)}, got {self.theta_mode!r}.'
            )
        if self.noise not in NoiseKind.values:
            raise UsageError(f'noise must be one of {", ".join(NoiseKind.values)}, got {self.noise!r}.')

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> 'ExperimentConfig':
        """
        Build a config from a mapping whose keys mirror the CLI flags.

        Keys may use ``-`` or ``_``. ``policies`` may be a list or a
        comma-separated string.

        Raises:
            UsageError: On unknown keys or invalid values
        """
        known = {f.name for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for raw_key, value in data.items():
            key = str(raw_key).replace('-', '_')
            if key not in known:
                raise UsageError(f'Unknown config field: {raw_key!r}.')
            kwargs[key] = value
        if 'policies' in kwargs:
            kwargs['policies'] = parse_policies(kwargs['policies'])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise UsageError(f'Invalid config: {exc}') from exc

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping, with ``policies`` as a list."""
        data = asdict(self)
        data['policies'] = [str(p) for p in self.policies]
        return data

    @property
    def W0(self) -> np.ndarray:
        """Regularizer ``kappa * I``."""
        return self.kappa * np.eye(self.dim)

    def recording_grid(self) -> np.ndarray:
        """
        Rounds at which curves are recorded.

        Rounds ``1..d`` (the initial batch), every ``record_every``-th round,
        and the final round.

        Returns:
            np.ndarray: Sorted unique rounds in ``[1, rounds]``
        """
        grid = set(range(1, min(self.dim, self.rounds) + 1))
        grid.update(range(self.record_every, self.rounds + 1, self.record_every))
        grid.add(self.rounds)
        return np.array(sorted(grid), dtype=int)


def parse_policies(value: Union[str, List[str], Tuple[str, ...]]) -> Tuple[str, ...]:
    """Normalize a policy list given as a comma-separated string or a sequence."""
    if isinstance(value, str):
        items = value.split(',')
    elif isinstance(value, (list, tuple)):
        items = [str(item) for item in value]
    else:
        raise UsageError(f'policies must be a list or comma-separated string, got {value!r}.')
    return tuple(item.strip() for item in items if item.strip())


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON config document.

    Args:
        path: Path to a JSON object

    Returns:
        Dict[str, Any]: The decoded object

    Raises:
        UsageError: If the file cannot be read or is not a JSON object
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f'Cannot read config file {path}: {exc.strerror or exc}') from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f'Config file {path} is not valid JSON: {exc}') from exc
    if not isinstance(data, dict):
        raise UsageError(f'Config file {path} must contain a JSON object.')
    return data


def merge_layers(*layers: Mapping[str, Any]) -> ExperimentConfig:
    """
    Merge config layers, later ones winning; ``None`` values are skipped.

    Returns:
        ExperimentConfig: The validated config
    """
    merged: Dict[str, Any] = {}
    for layer in layers:
        for key, value in layer.items():
            if value is not None:
                merged[str(key).replace('-', '_')] = value
    return ExperimentConfig.from_mapping(merged)
