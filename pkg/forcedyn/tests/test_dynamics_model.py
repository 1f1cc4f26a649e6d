"""
Tests for the dynamics model, its normalization and training.
"""

from typing import List

import numpy as np
import pytest

from forcedyn.core.constants import DEFAULT_F_MAX_N, FORCE_DIMS, NORM_STD_FLOOR, STATE_DIM
from forcedyn.core.exceptions import DivergenceError
from forcedyn.data.grid import GridTable, lattice
from forcedyn.data.trajectories import Trajectory, stack_trajectories
from forcedyn.dynamics.model import (
    DynamicsConfig,
    DynamicsModel,
    NormStats,
    forward,
    init_model,
)
from forcedyn.dynamics.oracle import GridOracleDynamics
from forcedyn.dynamics.protocols import TransitionModel
from forcedyn.dynamics.training import (
    Adam,
    TrainReport,
    batch_loss,
    clip_gradients,
    episodes_to_reach,
    finetune,
    train,
)
from forcedyn.sim.state import ForceState


class TestDynamicsConfig:
    """Test hyperparameter validation."""

    def test_defaults(self) -> None:
        """Test the default width and step size."""
        config = DynamicsConfig()
        assert config.hidden_size == 64
        assert config.learning_rate == pytest.approx(1e-3)

    @pytest.mark.parametrize("kwargs", [{"hidden_size": 0}, {"learning_rate": -1e-3}])
    def test_rejects_bad_values(self, kwargs: dict) -> None:
        """Test that H < 1 and negative step sizes are rejected."""
        with pytest.raises(ValueError):
            DynamicsConfig(**kwargs)


class TestNormStats:
    """Test per-dimension normalization."""

    def test_identity(self) -> None:
        """Test that identity statistics leave values unchanged."""
        stats = NormStats.identity()
        values = np.arange(STATE_DIM, dtype=float)
        np.testing.assert_array_equal(stats.normalize_states(values), values)

    def test_constant_dims_are_floored(self) -> None:
        """Test that a constant dim gets a floored std instead of zero."""
        rng = np.random.default_rng(0)
        states = rng.normal(size=(200, STATE_DIM))
        states[:, 3] = 7.0
        stats = NormStats.from_data(states, rng.normal(size=(200, 2)))
        assert stats.state_std[3] >= NORM_STD_FLOOR
        assert stats.state_std[3] == pytest.approx(0.01 * np.median(states[:, :15].std(axis=0)))
        assert np.all(np.isfinite(stats.normalize_states(states)))

    def test_round_trip(self, trajectories: List[Trajectory]) -> None:
        """Test that denormalize inverts normalize."""
        states, actions = stack_trajectories(trajectories)
        stats = NormStats.from_data(states, actions)
        np.testing.assert_allclose(
            stats.denormalize_states(stats.normalize_states(states)), states, atol=1e-9
        )

    def test_empty_data(self) -> None:
        """Test that empty arrays cannot be fitted."""
        with pytest.raises(ValueError):
            NormStats.from_data(np.zeros((0, STATE_DIM)), np.zeros((0, 2)))

    def test_unfloored_std_rejected(self) -> None:
        """Test that zero spreads are refused at construction."""
        with pytest.raises(ValueError):
            NormStats(np.zeros(STATE_DIM), np.zeros(STATE_DIM), np.zeros(2), np.ones(2))


class TestDynamicsModel:
    """Test the model wrapper."""

    def test_is_a_transition_model(self, small_model: DynamicsModel) -> None:
        """Test protocol conformance."""
        assert isinstance(small_model, TransitionModel)

    def test_parameter_count(self, small_model: DynamicsModel) -> None:
        """Test the parameter count for H = 4."""
        expected = (32 + 4) * 16 + 16 + 8 * 16 + 16 + 4 * 30 + 30
        assert small_model.parameter_count == expected

    def test_seeded_init(self) -> None:
        """Test that init_model is deterministic per seed."""
        config = DynamicsConfig(hidden_size=4)
        a, b = init_model(config, seed=3), init_model(config, seed=3)
        np.testing.assert_array_equal(a.params["W1"], b.params["W1"])
        assert not np.array_equal(a.params["W1"], init_model(config, seed=4).params["W1"])
        assert a.config.seed == 3

    def test_forward_wrapper(self, small_model: DynamicsModel, round_goal: ForceState) -> None:
        """Test the single-state forward."""
        prediction, hidden = forward(small_model, round_goal, (0.5, 0.0))
        assert isinstance(prediction, ForceState)
        assert hidden.h1.shape == (1, 4)
        again, _ = forward(small_model, round_goal, (0.5, 0.0))
        assert again == prediction

    def test_predict_sequence_matches_stepping(
        self, small_model: DynamicsModel, trajectories: List[Trajectory]
    ) -> None:
        """Test that teacher-forced sequences equal step-by-step forwards."""
        states, actions = stack_trajectories(trajectories[:3])
        small_model.fit_norm_stats(states, actions)
        predicted = small_model.predict_sequence(states, actions)
        assert predicted.shape == (3, 4, STATE_DIM)
        hidden = small_model.initial_hidden(states[:, 0])
        for t in range(4):
            step, hidden = small_model.forward(states[:, t], actions[:, t], hidden)
            np.testing.assert_allclose(predicted[:, t], step, atol=1e-10)

    def test_copy_is_independent(self, small_model: DynamicsModel) -> None:
        """Test that a copy does not share arrays."""
        clone = small_model.copy()
        clone.params["W1"][0, 0] += 1.0
        clone.norm_stats.state_mean[0] += 1.0
        assert clone.params["W1"][0, 0] != small_model.params["W1"][0, 0]
        assert small_model.norm_stats.state_mean[0] == 0.0

    def test_missing_parameters(self, small_model: DynamicsModel) -> None:
        """Test that an incomplete parameter dict is rejected."""
        params = dict(small_model.params)
        del params["Wy"]
        with pytest.raises(ValueError):
            DynamicsModel(small_model.config, params, NormStats.identity())


class TestOptimizer:
    """Test Adam and gradient clipping."""

    def test_clip_returns_norm_before_clipping(self) -> None:
        """Test global-norm clipping."""
        grads = {"a": np.array([3.0]), "b": np.array([4.0])}
        assert clip_gradients(grads, 1.0) == pytest.approx(5.0)
        assert np.sqrt(grads["a"][0] ** 2 + grads["b"][0] ** 2) == pytest.approx(1.0)

    def test_small_gradients_untouched(self) -> None:
        """Test that gradients under the limit are not scaled."""
        grads = {"a": np.array([0.3])}
        clip_gradients(grads, 1.0)
        assert grads["a"][0] == 0.3

    def test_adam_moves_against_gradient(self) -> None:
        """Test that the first Adam step moves each entry by the step size."""
        params = {"w": np.array([1.0, -1.0])}
        Adam(0.1).step(params, {"w": np.array([2.0, -0.5])})
        np.testing.assert_allclose(params["w"], [0.9, -0.9], atol=1e-6)

    def test_adam_rejects_negative_rate(self) -> None:
        """Test step size validation."""
        with pytest.raises(ValueError):
            Adam(-0.1)


class TestTraining:
    """Test pretraining and finetuning."""

    def test_loss_decreases(
        self, small_model: DynamicsModel, trajectories: List[Trajectory]
    ) -> None:
        """Test that training lowers the full-batch loss."""
        states, actions = stack_trajectories(trajectories)
        probe = small_model.copy()
        probe.fit_norm_stats(states, actions)
        before, _ = batch_loss(probe, states, actions)
        report = train(
            small_model, trajectories, episodes=150, trajs_per_episode=12, learning_rate=1e-2
        )
        after, _ = batch_loss(small_model, states, actions)
        assert report.episodes_run == 150
        assert len(report.losses) == 150
        assert after < before

    def test_zero_learning_rate_keeps_loss(
        self, small_model: DynamicsModel, trajectories: List[Trajectory]
    ) -> None:
        """Test that a zero step size never changes a single-trajectory loss."""
        report = train(
            small_model, trajectories[:1], episodes=5, trajs_per_episode=1, learning_rate=0.0
        )
        assert len(set(report.losses)) == 1

    def test_zero_episodes(
        self, small_model: DynamicsModel, trajectories: List[Trajectory]
    ) -> None:
        """Test that zero episodes fits normalization but takes no step."""
        weights = small_model.params["W1"].copy()
        report = train(small_model, trajectories, episodes=0)
        assert report.episodes_run == 0
        assert report.final_loss is None
        np.testing.assert_array_equal(small_model.params["W1"], weights)
        assert not np.array_equal(small_model.norm_stats.state_std, np.ones(STATE_DIM))

    def test_checkpoints(self, small_model: DynamicsModel, trajectories: List[Trajectory]) -> None:
        """Test that the evaluation callback runs at 0 and every period."""
        calls: List[int] = []

        def evaluate(model: DynamicsModel) -> float:
            calls.append(1)
            return 10.0 - len(calls)

        report = train(small_model, trajectories, episodes=5, eval_fn=evaluate, eval_every=2)
        assert [episode for episode, _ in report.checkpoints] == [0, 2, 4]
        assert episodes_to_reach(report, 7.5) == 4
        assert episodes_to_reach(report, 1.0) is None

    def test_seeded(self, trajectories: List[Trajectory]) -> None:
        """Test that training is deterministic given seeds."""
        config = DynamicsConfig(hidden_size=4)
        a, b = init_model(config, seed=1), init_model(config, seed=1)
        train(a, trajectories, episodes=3, trajs_per_episode=4, seed=2)
        train(b, trajectories, episodes=3, trajs_per_episode=4, seed=2)
        np.testing.assert_array_equal(a.params["W2"], b.params["W2"])

    def test_divergence(self, small_model: DynamicsModel, trajectories: List[Trajectory]) -> None:
        """Test that a non-finite loss raises DivergenceError."""
        small_model.params["by"][:] = np.nan
        with pytest.raises(DivergenceError) as exc_info:
            train(small_model, trajectories, episodes=2)
        assert exc_info.value.episode == 1

    @pytest.mark.parametrize("kwargs", [{"episodes": -1}, {"trajs_per_episode": 0}])
    def test_bad_arguments(
        self, small_model: DynamicsModel, trajectories: List[Trajectory], kwargs: dict
    ) -> None:
        """Test argument validation."""
        arguments = {"episodes": 2}
        arguments.update(kwargs)
        with pytest.raises(ValueError):
            train(small_model, trajectories, **arguments)

    def test_finetune_keeps_normalization(
        self, small_model: DynamicsModel, trajectories: List[Trajectory]
    ) -> None:
        """Test that finetuning trains without refitting statistics."""
        train(small_model, trajectories[:6], episodes=2)
        stats = small_model.norm_stats
        weights = small_model.params["W1"].copy()
        report = finetune(small_model, trajectories[6:], episodes=3)
        assert small_model.norm_stats is stats
        assert isinstance(report, TrainReport)
        assert not np.array_equal(small_model.params["W1"], weights)


# Commanded moves of the 2 x 2 grid world: one cell along an axis, or stay.
WORLD_MOVES = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0], [0.0, 0.0]])


def grid_world() -> GridTable:
    """Four-cell world whose cells carry distinct, easily separated states."""
    states = np.ones((4, STATE_DIM))
    for cell in range(4):
        states[cell, cell] = 5.0
        states[cell, FORCE_DIMS + cell] = 5.0
    return GridTable(
        hole_id="grid-world",
        n=2,
        grid_range=(2.0, 2.0),
        f_max=DEFAULT_F_MAX_N,
        positions=lattice(2, (2.0, 2.0)),
        states=states,
        mask=np.ones(4, dtype=bool),
    )


def world_trajectories(grid: GridTable, count: int, steps: int, seed: int) -> List[Trajectory]:
    """Walks of commanded moves; a move off the world leaves the peg in place."""
    rng = np.random.default_rng(seed)
    walks = []
    for _ in range(count):
        actions = WORLD_MOVES[rng.integers(len(WORLD_MOVES), size=steps)]
        positions = np.empty((steps + 1, 2))
        positions[0] = grid.positions[rng.integers(4)]
        for t in range(steps):
            positions[t + 1] = grid.clamp(positions[t] + actions[t])
        states = grid.states[grid.nearest_indices(positions)]
        walks.append(Trajectory(actions=actions, positions=positions, states=states))
    return walks


@pytest.mark.slow
class TestGridWorld:
    """Test that training recovers piecewise-constant grid dynamics."""

    def test_rollouts_match_grid_lookup(self) -> None:
        """Test that free-running predictions stay within 5% of nearest-grid lookups."""
        grid = grid_world()
        model = init_model(DynamicsConfig(hidden_size=16), seed=0)
        train(
            model,
            world_trajectories(grid, 200, 4, seed=1),
            episodes=2000,
            trajs_per_episode=32,
            seed=2,
            learning_rate=1e-2,
            log_every=0,
        )
        oracle = GridOracleDynamics(grid)
        predicted, hidden = grid.states, model.initial_hidden(grid.states)
        expected, believed = grid.states, oracle.initial_hidden(grid.states)
        for move in ([2.0, 0.0], [0.0, 2.0], [-2.0, 0.0], [0.0, -2.0]):
            actions = np.tile(move, (4, 1))
            predicted, hidden = model.forward(predicted, actions, hidden)
            expected, believed = oracle.forward(expected, actions, believed)
            error = np.linalg.norm(predicted - expected, axis=1)
            assert np.all(error <= 0.05 * np.linalg.norm(expected, axis=1))
