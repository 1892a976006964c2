"""
Aggregated curves, bound curves and rate fitting.

``AggregatedCurve`` holds per-round mean and standard error of the squared
estimation error and cumulative regret across trials for one policy.
Bound curves evaluate the closed-form bounds on the same recording grid.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from bandits.analysis import (
    BoundParams,
    mse_lower_bound,
    mse_tail_threshold,
    mse_upper_bound,
    ofu_inconsistency_floor,
    ofu_regret_bound,
    orth_batch_exact_mse,
)
from bandits.exceptions import UsageError
from bandits.policies import PolicyKind
from experiments.config import ExperimentConfig


CURVE_COLUMNS = (
    'policy', 'round', 'mse_mean', 'mse_stderr', 'regret_mean', 'regret_stderr', 'n_trials',
)
BOUND_COLUMNS = (
    'round', 'mse_upper', 'mse_lower', 'tail_threshold', 'ofu_floor', 'ofu_regret_bound',
)

MIN_SLOPE_POINTS = 5


def _mean_stderr(samples: np.ndarray):
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, samples.std(axis=0, ddof=1) / np.sqrt(n)


@dataclass(eq=False)
class AggregatedCurve:
    """
    Per-round statistics of one policy across trials.

    Attributes:
        policy: Policy kind
        rounds: Recorded rounds
        mse_mean: Mean squared estimation error per round
        mse_stderr: Sample standard deviation over sqrt(n_trials)
        regret_mean: Mean cumulative regret per round
        regret_stderr: Standard error of the cumulative regret
        n_trials: Number of trials aggregated
        final_errors: Per-trial squared error at the last round (not emitted)
    """
    policy: str
    rounds: np.ndarray
    mse_mean: np.ndarray
    mse_stderr: np.ndarray
    regret_mean: np.ndarray
    regret_stderr: np.ndarray
    n_trials: int
    final_errors: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_samples(
        cls,
        policy: str,
        rounds: np.ndarray,
        mse_samples: np.ndarray,
        regret_samples: np.ndarray,
    ) -> 'AggregatedCurve':
        """
        Aggregate trial samples stacked in trial-index order.

        Args:
            policy: Policy kind
            rounds: Recorded rounds (length G)
            mse_samples: trials x G squared errors
            regret_samples: trials x G cumulative regrets

        Returns:
            AggregatedCurve: The aggregate
        """
        mse_mean, mse_stderr = _mean_stderr(mse_samples)
        regret_mean, regret_stderr = _mean_stderr(regret_samples)
        return cls(
            policy=str(policy),
            rounds=np.asarray(rounds, dtype=int),
            mse_mean=mse_mean,
            mse_stderr=mse_stderr,
            regret_mean=regret_mean,
            regret_stderr=regret_stderr,
            n_trials=int(mse_samples.shape[0]),
            final_errors=mse_samples[:, -1].copy(),
        )

    def index_of(self, round_: int) -> int:
        """
        Position of a recorded round.

        Raises:
            UsageError: If the round was not recorded
        """
        hits = np.flatnonzero(self.rounds == round_)
        if hits.size == 0:
            raise UsageError(f'Round {round_} was not recorded for policy {self.policy}.')
        return int(hits[0])

    def nearest_index(self, round_: float) -> int:
        """Position of the recorded round closest to ``round_``."""
        return int(np.argmin(np.abs(self.rounds - round_)))

    def records(self) -> List[Dict[str, Any]]:
        """Rows in ``CURVE_COLUMNS`` order."""
        return [
            {
                'policy': self.policy,
                'round': int(self.rounds[i]),
                'mse_mean': float(self.mse_mean[i]),
                'mse_stderr': float(self.mse_stderr[i]),
                'regret_mean': float(self.regret_mean[i]),
                'regret_stderr': float(self.regret_stderr[i]),
                'n_trials': self.n_trials,
            }
            for i in range(len(self.rounds))
        ]


def _column(rows: Sequence[Dict[str, Any]], name: str) -> np.ndarray:
    return np.array([float(r[name]) for r in rows])


def curves_from_records(rows: Sequence[Dict[str, Any]]) -> List[AggregatedCurve]:
    """
    Rebuild curves from emitted rows, grouping by policy in first-seen order.

    Args:
        rows: Mappings with ``CURVE_COLUMNS`` keys

    Returns:
        List[AggregatedCurve]: One curve per policy
    """
    grouped: Dict[str, List[Dict[str, Any]]] = {}
    for row in rows:
        missing = [c for c in CURVE_COLUMNS if c not in row]
        if missing:
            raise UsageError(f'Curve record is missing columns: {", ".join(missing)}.')
        grouped.setdefault(str(row['policy']), []).append(row)
    curves = []
    for policy, items in grouped.items():
        items = sorted(items, key=lambda r: int(r['round']))
        curves.append(AggregatedCurve(
            policy=policy,
            rounds=np.array([int(r['round']) for r in items], dtype=int),
            mse_mean=_column(items, 'mse_mean'),
            mse_stderr=_column(items, 'mse_stderr'),
            regret_mean=_column(items, 'regret_mean'),
            regret_stderr=_column(items, 'regret_stderr'),
            n_trials=int(items[0]['n_trials']),
        ))
    return curves


def bound_params(config: ExperimentConfig, t: float) -> BoundParams:
    """Bound parameters matching an experiment at round ``t``."""
    return BoundParams(
        t=t,
        d=config.dim,
        sigma=config.sigma,
        kappa=config.kappa,
        S=config.theta_norm,
        delta=config.delta,
    )


def bound_records(config: ExperimentConfig, rounds: Optional[np.ndarray] = None) -> List[Dict[str, Any]]:
    """
    Evaluate every bound on the recording grid.

    Args:
        config: Experiment parameters
        rounds: Rounds to evaluate; defaults to ``config.recording_grid()``

    Returns:
        List[Dict[str, Any]]: Rows in ``BOUND_COLUMNS`` order
    """
    grid = config.recording_grid() if rounds is None else rounds
    floor = ofu_inconsistency_floor(config.sigma, config.delta)
    base = bound_params(config, 1)
    rows = []
    for t in grid:
        params = base.with_t(int(t))
        rows.append({
            'round': int(t),
            'mse_upper': mse_upper_bound(params),
            'mse_lower': mse_lower_bound(params),
            'tail_threshold': mse_tail_threshold(params),
            'ofu_floor': floor,
            'ofu_regret_bound': ofu_regret_bound(params, int(t)),
        })
    return rows


def fit_loglog_slope(curve: AggregatedCurve, t_min: float, t_max: float) -> float:
    """
    Least-squares slope of ``log(mse_mean)`` against ``log(round)``.

    Args:
        curve: Aggregated curve
        t_min: Smallest round included
        t_max: Largest round included

    Returns:
        float: The fitted slope

    Raises:
        UsageError: If fewer than 5 recorded rounds with positive MSE fall in range
    """
    mask = (curve.rounds >= t_min) & (curve.rounds <= t_max) & (curve.mse_mean > 0)
    if int(mask.sum()) < MIN_SLOPE_POINTS:
        raise UsageError(
            f'Need at least {MIN_SLOPE_POINTS} recorded rounds with positive MSE in '
            f'[{t_min}, {t_max}], found {int(mask.sum())}.'
        )
    slope, _ = np.polyfit(np.log(curve.rounds[mask]), np.log(curve.mse_mean[mask]), 1)
    return float(slope)


@dataclass
class PolicySummary:
    """Headline numbers for one policy in a comparison."""
    policy: str
    early_round: int
    final_round: int
    early_mse: float
    final_mse: float
    final_stderr: float

    @property
    def ratio(self) -> float:
        """``final_mse / early_mse``."""
        return self.final_mse / self.early_mse if self.early_mse > 0 else float('nan')


def summarize(curves: Sequence[AggregatedCurve], config: ExperimentConfig) -> Dict[str, Any]:
    """
    Plateau/decay summary of a comparison run.

    Reports, per policy, the MSE near T/10 and at T and their ratio. For
    ``orth-batch`` adds the log-log slope over [T/6, T] and the exact
    expected error after the completed batches; for ``ofu`` adds the floor
    ``sigma^2 (1 - delta)`` and the fraction of trials whose final squared
    error is at least ``sigma^2``.

    Returns:
        Dict[str, Any]: ``policies`` (list of PolicySummary) plus extra keys
    """
    summary: Dict[str, Any] = {'policies': []}
    for curve in curves:
        early = curve.nearest_index(config.rounds / 10)
        last = len(curve.rounds) - 1
        summary['policies'].append(PolicySummary(
            policy=curve.policy,
            early_round=int(curve.rounds[early]),
            final_round=int(curve.rounds[last]),
            early_mse=float(curve.mse_mean[early]),
            final_mse=float(curve.mse_mean[last]),
            final_stderr=float(curve.mse_stderr[last]),
        ))
        if curve.policy == PolicyKind.ORTH_BATCH:
            try:
                summary['orth_slope'] = fit_loglog_slope(curve, config.rounds / 6, config.rounds)
            except UsageError:
                summary['orth_slope'] = None
            summary['orth_exact_mse'] = orth_batch_exact_mse(
                config.dim, config.rounds // config.dim, config.sigma, config.kappa, config.theta_norm,
            )
        elif curve.policy == PolicyKind.OFU:
            summary['ofu_floor'] = ofu_inconsistency_floor(config.sigma, config.delta)
            if curve.final_errors is not None and config.sigma > 0:
                summary['ofu_failure_fraction'] = float(np.mean(curve.final_errors >= config.sigma ** 2))
    return summary
