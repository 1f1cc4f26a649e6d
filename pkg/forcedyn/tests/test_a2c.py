"""
Tests for offline actor-critic training and the online baseline.
"""

import math
from typing import Any, Tuple

import numpy as np
import pytest

from forcedyn.core.constants import STATE_DIM
from forcedyn.data.grid import GridTable
from forcedyn.dynamics.oracle import GridOracleDynamics
from forcedyn.dynamics.training import Adam
from forcedyn.rl.a2c import (
    Episode,
    ModelStepper,
    PolicyTrainReport,
    a2c_update,
    collect_episode,
    discounted_returns,
    initial_indices,
    train_offline,
)
from forcedyn.rl.online import SimulatorStepper, train_online
from forcedyn.rl.policy import PolicyConfig, PolicyModel, init_policy, policy_forward
from forcedyn.rl.reward import RewardConfig, sigma_from_grid
from forcedyn.sim.contact import ContactSimulator
from forcedyn.sim.state import ForceState


class CountingOracle(GridOracleDynamics):
    """Grid oracle that counts forward calls."""

    def __init__(self, grid: GridTable) -> None:
        super().__init__(grid)
        self.calls = 0

    def forward(
        self, states: np.ndarray, actions: np.ndarray, hidden: np.ndarray
    ) -> Tuple[np.ndarray, Any]:
        self.calls += 1
        return super().forward(states, actions, hidden)


@pytest.fixture
def policy() -> PolicyModel:
    """Small untrained policy."""
    return init_policy(PolicyConfig(hidden_size=8, learning_rate=1e-2), sigma=1.0, seed=1)


@pytest.fixture
def reward_cfg(coarse_grid: GridTable, round_goal: ForceState) -> RewardConfig:
    """Reward with a bandwidth fitted to the coarse grid."""
    return RewardConfig(sigma=sigma_from_grid(coarse_grid, round_goal))


class TestReturns:
    """Test n-step returns and report helpers."""

    def test_discounted_returns(self) -> None:
        """Test backward accumulation with and without a bootstrap."""
        np.testing.assert_allclose(
            discounted_returns(np.array([0.0, 0.0, 1.0]), 0.0, 0.5), [0.25, 0.5, 1.0]
        )
        np.testing.assert_allclose(discounted_returns(np.array([1.0]), 2.0, 0.5), [2.0])
        assert discounted_returns(np.array([]), 3.0, 0.9).size == 0

    def test_trailing_mean_return(self) -> None:
        """Test the windowed mean."""
        report = PolicyTrainReport(returns=[1.0, 2.0, 3.0, 4.0])
        assert report.trailing_mean_return(2) == 3.5
        assert report.trailing_mean_return(2, end=2) == 1.5
        assert report.trailing_mean_return(10) == 2.5
        assert math.isnan(PolicyTrainReport().trailing_mean_return(5))


class TestCollectEpisode:
    """Test rollouts of the stochastic policy."""

    def test_ends_on_goal(self, policy: PolicyModel, round_goal: ForceState) -> None:
        """Test that reaching the goal stops the episode."""
        episode = collect_episode(
            policy,
            np.zeros(STATE_DIM),
            lambda move: round_goal.values,
            round_goal,
            RewardConfig(),
            horizon=5,
            rng=np.random.default_rng(0),
        )
        assert episode.reached_goal
        assert episode.rewards.tolist() == [1.0]
        assert episode.states.shape == (1, STATE_DIM)

    def test_runs_to_horizon(self, policy: PolicyModel, round_goal: ForceState) -> None:
        """Test that a goal never reached uses the full horizon."""
        far = round_goal.values + 100.0
        episode = collect_episode(
            policy,
            far,
            lambda move: far,
            round_goal,
            RewardConfig(),
            horizon=4,
            rng=np.random.default_rng(0),
        )
        assert not episode.reached_goal
        assert len(episode.actions) == 4
        assert episode.total_return == pytest.approx(4 * -0.02)
        assert all(0 <= a < 8 for a in episode.actions)


class TestA2CUpdate:
    """Test the actor-critic step."""

    def test_empty_episode(self, policy: PolicyModel) -> None:
        """Test that an empty episode leaves the policy untouched."""
        weights = policy.params["Wa1"].copy()
        empty = Episode(
            states=np.zeros((0, STATE_DIM)),
            actions=np.zeros(0, dtype=int),
            rewards=np.zeros(0),
            final_state=np.zeros(STATE_DIM),
            reached_goal=False,
        )
        assert a2c_update(policy, Adam(0.1), empty) == 0.0
        np.testing.assert_array_equal(policy.params["Wa1"], weights)

    def test_rewarded_action_becomes_likelier(self, policy: PolicyModel) -> None:
        """Test that a positive advantage raises the chosen action's probability."""
        state = np.linspace(-1.0, 1.0, STATE_DIM)
        before, _ = policy_forward(policy, ForceState(state))
        episode = Episode(state[None], np.array([3]), np.array([1.0]), state, True)
        optimizer = Adam(1e-2)
        for _ in range(5):
            loss = a2c_update(policy, optimizer, episode)
            assert math.isfinite(loss)
        after, _ = policy_forward(policy, ForceState(state))
        assert after[3] > before[3]


class TestTrainOffline:
    """Test training against a frozen transition model."""

    def test_start_states_skip_the_goal(
        self,
        coarse_grid: GridTable,
        round_goal: ForceState,
        reward_cfg: RewardConfig,
        policy: PolicyModel,
    ) -> None:
        """Test that starts already at the goal are excluded."""
        starts = initial_indices(coarse_grid, round_goal, reward_cfg, policy)
        assert coarse_grid.nearest_index((0.0, 0.0)) not in starts
        assert 0 < starts.size < coarse_grid.probe_total

    def test_uses_only_the_model(
        self,
        coarse_grid: GridTable,
        round_goal: ForceState,
        reward_cfg: RewardConfig,
        policy: PolicyModel,
    ) -> None:
        """Test that episodes are driven by the transition model."""
        oracle = CountingOracle(coarse_grid)
        report = train_offline(
            policy, oracle, coarse_grid, 6, round_goal, reward_cfg, horizon=3, seed=2
        )
        assert report.episodes_run == 6
        assert len(report.returns) == len(report.losses) == 6
        assert 6 <= oracle.calls <= 18
        assert all(3 * -0.02 - 1e-12 <= r <= 1.0 for r in report.returns)

    def test_deterministic(
        self,
        coarse_grid: GridTable,
        round_goal: ForceState,
        reward_cfg: RewardConfig,
        policy: PolicyModel,
    ) -> None:
        """Test that the seed fixes the trained parameters."""
        other = policy.copy()
        oracle = GridOracleDynamics(coarse_grid)
        a = train_offline(policy, oracle, coarse_grid, 4, round_goal, reward_cfg, seed=7)
        b = train_offline(other, oracle, coarse_grid, 4, round_goal, reward_cfg, seed=7)
        assert a.returns == b.returns
        np.testing.assert_array_equal(policy.params["Wa2"], other.params["Wa2"])

    def test_model_stepper(self, coarse_grid: GridTable) -> None:
        """Test that the stepper carries the model's hidden value."""
        stepper = ModelStepper(GridOracleDynamics(coarse_grid), coarse_grid.states[0])
        state = stepper(np.array([1.0, 0.0]))
        np.testing.assert_array_equal(state, coarse_grid.states[1])
        np.testing.assert_allclose(stepper.hidden, [[-1.0, -2.0]])


class TestTrainOnline:
    """Test the online baseline's probe accounting."""

    def test_training_probes(
        self, policy: PolicyModel, quiet_simulator: ContactSimulator, round_goal: ForceState
    ) -> None:
        """Test that every observation and move is a counted probe."""
        report = train_online(
            policy, quiet_simulator, round_goal, episodes=3, horizon=2, eval_every=0, seed=1
        )
        assert report.episodes_run == 3
        assert report.evaluation_probes == 0
        assert report.training_probes == quiet_simulator.probe_count
        assert 6 <= report.training_probes <= 9
        assert not report.reached

    def test_stops_at_target(
        self, policy: PolicyModel, quiet_simulator: ContactSimulator, round_goal: ForceState
    ) -> None:
        """Test that training ends at the first evaluation meeting the target."""
        report = train_online(
            policy,
            quiet_simulator,
            round_goal,
            episodes=10,
            horizon=1,
            eval_every=1,
            eval_trials=2,
            target_success=0.0,
            max_steps=1,
        )
        assert report.reached
        assert report.episodes_run == 1
        assert report.success_history[0][0] == 1
        assert report.evaluation_probes > 0
        assert report.training_probes + report.evaluation_probes == quiet_simulator.probe_count

    def test_simulator_stepper(self, quiet_simulator: ContactSimulator) -> None:
        """Test that moves accumulate and each is probed."""
        stepper = SimulatorStepper(quiet_simulator, np.array([2.0, 0.0]), np.random.default_rng(0))
        stepper(np.array([-1.0, 0.0]))
        stepper(np.array([-1.0, 0.0]))
        np.testing.assert_array_equal(stepper.position, [0.0, 0.0])
        assert quiet_simulator.probe_count == 2
