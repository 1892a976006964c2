"""Tests for the action-selection policies and the episode runner."""
import numpy as np
import pytest

from bandits.environment import EnvironmentSpec, NoiseKind, NoiseModel, sample_theta
from bandits.exceptions import UsageError
from bandits.policies import (
    OFUPolicy,
    OrthBatchPolicy,
    PolicyKind,
    RadiusSettings,
    make_policy,
    ofu_select,
    orth_batch_plan,
    replay_trajectory,
    run_episode,
)


def _env(d=5, sigma=1.0, seed=0):
    theta = sample_theta(d, 1.0, np.random.default_rng(seed))
    return EnvironmentSpec(theta, 1.0, NoiseModel(NoiseKind.GAUSSIAN, sigma))


class TestOfuSelect:
    def test_zero_estimate_plays_first_axis(self):
        assert np.array_equal(ofu_select(np.zeros(3)), [1.0, 0.0, 0.0])

    def test_plays_estimate_direction(self):
        action = ofu_select([3.0, 4.0])
        assert np.allclose(action, [0.6, 0.8])

    def test_maximizes_inner_product(self):
        rng = np.random.default_rng(0)
        theta_hat = rng.standard_normal(4)
        best = ofu_select(theta_hat) @ theta_hat
        for _ in range(200):
            z = rng.standard_normal(4)
            assert z / np.linalg.norm(z) @ theta_hat <= best + 1e-12


class TestOrthBatchPlan:
    def test_zero_estimate_gives_standard_basis(self):
        assert np.array_equal(orth_batch_plan(np.zeros(4), 4), np.eye(4))

    def test_first_action_aligned(self):
        theta_hat = np.array([0.2, -0.5, 0.1])
        plan = orth_batch_plan(theta_hat, 3)
        assert np.allclose(plan[0], theta_hat / np.linalg.norm(theta_hat))
        assert np.allclose(plan @ plan.T, np.eye(3), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            orth_batch_plan(np.ones(3), 4)


class TestMakePolicy:
    def test_unsupported_kind(self):
        with pytest.raises(UsageError, match='Unsupported policy'):
            make_policy('thompson', 2, np.eye(2))

    def test_random_needs_generator(self):
        with pytest.raises(UsageError):
            make_policy(PolicyKind.RANDOM, 2, np.eye(2))

    def test_regularizer_dimension(self):
        with pytest.raises(UsageError):
            make_policy(PolicyKind.OFU, 3, np.eye(2))


class TestOrthBatchEpisode:
    def test_gram_matrix_after_complete_batches(self):
        """After l complete batches W = (kappa + l) I."""
        d, l, kappa = 5, 600, 1.0
        env = _env(d)
        traj = run_episode(PolicyKind.ORTH_BATCH, env, d * l, kappa * np.eye(d), np.random.default_rng(1))
        W = kappa * np.eye(d) + traj.actions.T @ traj.actions
        assert np.allclose(W, (kappa + l) * np.eye(d), rtol=0, atol=1e-10)

    def test_first_batch_is_standard_basis(self):
        traj = run_episode(PolicyKind.ORTH_BATCH, _env(4), 4, np.eye(4), np.random.default_rng(0))
        assert np.array_equal(traj.actions, np.eye(4))

    def test_snapshot_changes_only_at_batch_ends(self):
        d = 3
        traj = run_episode(PolicyKind.ORTH_BATCH, _env(d), 5 * d, np.eye(d), np.random.default_rng(2))
        # theta_hats[t] is the snapshot after round t + 1
        for t in range(1, 5 * d):
            if (t + 1) % d != 0:
                assert np.array_equal(traj.theta_hats[t], traj.theta_hats[t - 1])
            else:
                assert not np.array_equal(traj.theta_hats[t], traj.theta_hats[t - 1])
        assert np.array_equal(traj.theta_hats[0], np.zeros(d))

    def test_batches_align_with_planning_estimate(self):
        d = 4
        traj = run_episode(PolicyKind.ORTH_BATCH, _env(d), 6 * d, np.eye(d), np.random.default_rng(3))
        for start in range(d, 6 * d, d):
            planned_from = traj.theta_hats[start - 1]
            assert np.allclose(traj.actions[start], planned_from / np.linalg.norm(planned_from))
            batch = traj.actions[start:start + d]
            assert np.allclose(batch @ batch.T, np.eye(d), atol=1e-12)

    def test_noiseless_shrinkage(self):
        """Without noise the estimate after l batches is l / (kappa + l) theta_star."""
        d, l, kappa = 5, 4, 1.0
        env = _env(d, sigma=0.0)
        traj = run_episode(PolicyKind.ORTH_BATCH, env, d * l, kappa * np.eye(d), np.random.default_rng(0))
        assert np.allclose(traj.theta_hats[-1], l / (kappa + l) * env.theta_star, rtol=0, atol=1e-12)


class TestOfuEpisode:
    def test_actions_follow_previous_estimate(self):
        d = 3
        traj = run_episode(PolicyKind.OFU, _env(d), 50, np.eye(d), np.random.default_rng(4))
        assert np.array_equal(traj.actions[0], [1.0, 0.0, 0.0])
        for t in range(1, 50):
            assert np.allclose(traj.actions[t], ofu_select(traj.theta_hats[t - 1]))

    def test_actions_have_unit_norm(self):
        traj = run_episode(PolicyKind.OFU, _env(5), 100, np.eye(5), np.random.default_rng(5))
        assert np.allclose(np.linalg.norm(traj.actions, axis=1), 1.0)

    def test_records_confidence_radius(self):
        radius = RadiusSettings(delta=0.1, sigma=1.0, S=1.0, kappa=1.0)
        traj = run_episode(PolicyKind.OFU, _env(3), 30, np.eye(3), np.random.default_rng(6), radius=radius)
        assert traj.betas is not None
        assert traj.betas.shape == (30,)
        assert np.all(np.diff(traj.betas) >= 0)

    def test_no_radius_no_betas(self):
        traj = run_episode(PolicyKind.OFU, _env(3), 5, np.eye(3), np.random.default_rng(6))
        assert traj.betas is None


class TestRandomEpisode:
    def test_unit_directions(self):
        traj = run_episode(
            PolicyKind.RANDOM, _env(4), 40, np.eye(4), np.random.default_rng(7),
            action_rng=np.random.default_rng(8),
        )
        assert np.allclose(np.linalg.norm(traj.actions, axis=1), 1.0)

    def test_noiseless_rewards_are_inner_products(self):
        env = _env(4, sigma=0.0)
        traj = run_episode(
            PolicyKind.RANDOM, env, 3, np.eye(4), np.random.default_rng(7),
            action_rng=np.random.default_rng(8),
        )
        assert len(traj) == 3
        assert np.allclose(traj.rewards, traj.actions @ env.theta_star, rtol=0, atol=1e-14)


class TestRunEpisode:
    @pytest.mark.parametrize('kind', PolicyKind.values)
    def test_deterministic(self, kind):
        env = _env(4)
        first = run_episode(kind, env, 60, np.eye(4), np.random.default_rng(9), np.random.default_rng(10))
        second = run_episode(kind, env, 60, np.eye(4), np.random.default_rng(9), np.random.default_rng(10))
        assert np.array_equal(first.actions, second.actions)
        assert np.array_equal(first.rewards, second.rewards)
        assert np.array_equal(first.theta_hats, second.theta_hats)

    def test_lengths(self):
        traj = run_episode(PolicyKind.OFU, _env(2), 7, np.eye(2), np.random.default_rng(0))
        assert len(traj) == 7
        assert np.array_equal(traj.rounds, np.arange(1, 8))
        records = list(traj.records())
        assert records[0].round == 1 and records[-1].round == 7

    def test_invalid_rounds(self):
        with pytest.raises(UsageError):
            run_episode(PolicyKind.OFU, _env(2), 0, np.eye(2), np.random.default_rng(0))


class TestReplayTrajectory:
    def test_ofu_replay(self):
        traj = run_episode(PolicyKind.OFU, _env(3), 40, np.eye(3), np.random.default_rng(12))
        assert np.array_equal(replay_trajectory(traj, np.eye(3)), traj.theta_hats)

    def test_orth_batch_replay(self):
        d = 3
        traj = run_episode(PolicyKind.ORTH_BATCH, _env(d), 10 * d + 2, np.eye(d), np.random.default_rng(13))
        assert np.array_equal(replay_trajectory(traj, np.eye(d), refresh_every=d), traj.theta_hats)

    def test_invalid_period(self):
        traj = run_episode(PolicyKind.OFU, _env(2), 3, np.eye(2), np.random.default_rng(0))
        with pytest.raises(UsageError):
            replay_trajectory(traj, np.eye(2), refresh_every=0)


class TestPolicyState:
    def test_orth_batch_pending_queue(self):
        policy = OrthBatchPolicy(3, np.eye(3))
        policy.select()
        assert len(policy.pending) == 2

    def test_ofu_beta_without_data(self):
        policy = OFUPolicy(2, np.eye(2), radius=RadiusSettings(0.1, 1.0, 1.0, 1.0))
        assert policy.beta == pytest.approx(np.sqrt(2.0 * np.log(10.0)) + 1.0)
