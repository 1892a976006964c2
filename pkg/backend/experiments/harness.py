"""
Monte Carlo experiment runner.

Each (trial, policy) pair gets its own counter-based ``Philox`` generators,
derived from ``SeedSequence(seed, spawn_key=...)``:

- parameter stream: keyed by trial (or shared by all trials in ``fixed``
  mode), so every policy sees the same ``theta_star`` in a given trial;
- noise stream: keyed by (trial, policy), or by trial alone with
  ``shared_noise`` so policies run on common random numbers;
- action stream: keyed by (trial, policy), used by the random policy.

Policy keys come from the fixed ``PolicyKind`` order, so a policy's results
do not depend on which other policies run alongside it. Trials are split
into chunks for a process pool and written back by trial index, so the
aggregate is identical at any worker count.
"""
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import List, Optional, Tuple

import numpy as np

from bandits.analysis import cumulative_regret
from bandits.environment import EnvironmentSpec, NoiseModel, sample_theta
from bandits.exceptions import UsageError
from bandits.policies import PolicyKind, RadiusSettings, run_episode
from experiments.config import ExperimentConfig, ThetaMode
from experiments.curves import AggregatedCurve


logger = logging.getLogger(__name__)

THETA_STREAM = 0
NOISE_STREAM = 1
ACTION_STREAM = 2

POLICY_KEYS = {kind: index for index, kind in enumerate(PolicyKind.values)}


def make_generator(seed: int, *key: int) -> np.random.Generator:
    """
    Counter-based generator for one stream.

    Args:
        seed: Master seed
        *key: Stream identifiers appended as the spawn key

    Returns:
        np.random.Generator: A ``Philox``-backed generator
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class TrialStreams:
    """Generators used by one (trial, policy) pair."""
    theta: np.random.Generator
    noise: np.random.Generator
    action: np.random.Generator


def trial_streams(config: ExperimentConfig, trial: int, policy: str) -> TrialStreams:
    """
    Derive the generators of one (trial, policy) pair.

    Args:
        config: Experiment configuration
        trial: Trial index, from 0
        policy: Policy kind

    Returns:
        TrialStreams: Independent generators
    """
    policy_key = POLICY_KEYS[policy]
    if config.theta_mode == ThetaMode.FIXED:
        theta = make_generator(config.seed, THETA_STREAM)
    else:
        theta = make_generator(config.seed, THETA_STREAM, trial)
    if config.shared_noise:
        noise = make_generator(config.seed, NOISE_STREAM, trial)
    else:
        noise = make_generator(config.seed, NOISE_STREAM, trial, policy_key)
    action = make_generator(config.seed, ACTION_STREAM, trial, policy_key)
    return TrialStreams(theta, noise, action)


def run_trial(config: ExperimentConfig, policy: str, trial: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run one episode and sample it on the recording grid.

    Args:
        config: Experiment configuration
        policy: Policy kind
        trial: Trial index

    Returns:
        Tuple[np.ndarray, np.ndarray]: Squared error and cumulative regret at
            each recorded round
    """
    streams = trial_streams(config, trial, policy)
    theta_star = sample_theta(config.dim, config.theta_norm, streams.theta)
    env = EnvironmentSpec(theta_star, config.theta_norm, NoiseModel(config.noise, config.sigma))
    radius = None
    if policy == PolicyKind.OFU:
        radius = RadiusSettings(
            delta=config.delta,
            sigma=config.sigma,
            S=config.theta_norm,
            kappa=config.kappa,
            literal=config.beta_literal,
        )
    traj = run_episode(
        policy, env, config.rounds, config.W0, streams.noise,
        action_rng=streams.action, radius=radius,
    )
    index = config.recording_grid() - 1
    errors = traj.theta_hats[index] - theta_star
    mse = np.einsum('ij,ij->i', errors, errors)
    regret = cumulative_regret(traj, theta_star)[index]
    return mse, regret


def run_chunk(config: ExperimentConfig, policy: str, start: int, stop: int) -> Tuple[int, np.ndarray, np.ndarray]:
    """
    Run trials ``start..stop-1`` of one policy.

    Returns:
        Tuple[int, np.ndarray, np.ndarray]: ``start`` and the stacked
            (stop-start) x G squared errors and regrets
    """
    grid_size = len(config.recording_grid())
    mse = np.empty((stop - start, grid_size))
    regret = np.empty((stop - start, grid_size))
    for row, trial in enumerate(range(start, stop)):
        mse[row], regret[row] = run_trial(config, policy, trial)
    return start, mse, regret


def resolve_workers(requested: Optional[int] = None, cap: Optional[int] = None) -> int:
    """
    Worker count: the request (or the CPU count), capped by ``cap``.

    Args:
        requested: Requested workers, None for the hardware default
        cap: Upper limit, e.g. ``settings.LINBANDIT_THREADS``

    Returns:
        int: At least 1

    Raises:
        UsageError: If ``requested`` is below 1
    """
    if requested is not None and (isinstance(requested, bool) or int(requested) < 1):
        raise UsageError(f'workers must be a positive integer, got {requested!r}.')
    workers = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        workers = min(workers, cap)
    return max(1, int(workers))


def _chunks(trials: int, workers: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(trials / (workers * 4)))
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def collect_samples(
    config: ExperimentConfig,
    policy: str,
    workers: int = 1,
    executor: Optional[ProcessPoolExecutor] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-trial samples of one policy, rows in trial-index order.

    Args:
        config: Experiment configuration
        policy: Policy kind
        workers: Worker processes; 1 runs inline
        executor: Pool to reuse; created on demand when ``workers > 1``

    Returns:
        Tuple[np.ndarray, np.ndarray]: trials x G squared errors and regrets
    """
    grid_size = len(config.recording_grid())
    mse = np.empty((config.trials, grid_size))
    regret = np.empty((config.trials, grid_size))
    chunks = _chunks(config.trials, workers)

    if workers <= 1:
        results = [run_chunk(config, policy, start, stop) for start, stop in chunks]
    elif executor is not None:
        starts, stops = zip(*chunks)
        results = list(executor.map(run_chunk, repeat(config), repeat(policy), starts, stops))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return collect_samples(config, policy, workers, pool)

    for start, chunk_mse, chunk_regret in results:
        stop = start + chunk_mse.shape[0]
        mse[start:stop] = chunk_mse
        regret[start:stop] = chunk_regret
    return mse, regret


def run_experiment(config: ExperimentConfig, workers: int = 1) -> List[AggregatedCurve]:
    """
    Run every policy of the config and aggregate across trials.

    Args:
        config: Experiment configuration
        workers: Worker processes; results do not depend on this

    Returns:
        List[AggregatedCurve]: One curve per policy, in config order
    """
    logger.info(
        'Starting experiment: d=%d T=%d trials=%d policies=%s sigma=%g kappa=%g S=%g seed=%d workers=%d',
        config.dim, config.rounds, config.trials, ','.join(map(str, config.policies)),
        config.sigma, config.kappa, config.theta_norm, config.seed, workers,
    )
    grid = config.recording_grid()
    curves = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for policy in config.policies:
            started = time.perf_counter()
            mse, regret = collect_samples(config, policy, workers, pool)
            curves.append(AggregatedCurve.from_samples(policy, grid, mse, regret))
            logger.info('Policy %s finished in %.2fs', policy, time.perf_counter() - started)
    finally:
        if pool is not None:
            pool.shutdown()
    return curves
