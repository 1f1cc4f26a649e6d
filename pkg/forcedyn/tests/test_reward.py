"""
Tests for discrete actions, force-signature similarity and the reward.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forcedyn.core.constants import STATE_DIM
from forcedyn.data.grid import GridTable, lattice
from forcedyn.dynamics.model import NormStats
from forcedyn.rl.actions import (
    ACTION_COUNT,
    DEFAULT_STEP_SIZE_MM,
    DiscreteAction,
    Direction,
    action_table,
    action_vector,
)
from forcedyn.rl.reward import (
    RewardConfig,
    reward,
    sigma_from_grid,
    similarity,
    squared_distances,
)
from forcedyn.sim.state import ForceState

ORIGIN = ForceState(np.zeros(STATE_DIM))


def tiny_grid(states: np.ndarray) -> GridTable:
    """2 x 2 grid holding the given states."""
    return GridTable(
        hole_id="test-1",
        n=2,
        grid_range=(1.0, 1.0),
        f_max=10.0,
        positions=lattice(2, (1.0, 1.0)),
        states=np.array(states, dtype=float),
        mask=np.ones(4, dtype=bool),
    )


def shifted(value: float) -> ForceState:
    """State equal to ``value`` in its first dim and zero elsewhere."""
    values = np.zeros(STATE_DIM)
    values[0] = value
    return ForceState(values)


class TestActions:
    """Test the eight discrete moves."""

    def test_order_and_step(self) -> None:
        """Test the compass order and the default half-millimeter step."""
        assert DEFAULT_STEP_SIZE_MM == 0.5
        table = action_table()
        assert table.shape == (ACTION_COUNT, 2)
        np.testing.assert_array_equal(table[Direction.E], [0.5, 0.0])
        np.testing.assert_array_equal(table[Direction.S], [0.0, -0.5])
        np.testing.assert_array_equal(table[Direction.NE], [0.5, 0.5])
        np.testing.assert_array_equal(table[Direction.NW], [-0.5, 0.5])

    def test_opposites_cancel(self) -> None:
        """Test that E/W, S/N, NE/SW and SE/NW cancel."""
        table = action_table(1.0)
        for a, b in [(0, 2), (1, 3), (4, 5), (6, 7)]:
            np.testing.assert_array_equal(table[a] + table[b], [0.0, 0.0])

    def test_action_vector(self) -> None:
        """Test single-move lookup with a custom step."""
        np.testing.assert_array_equal(action_vector(2, 0.25), [-0.25, 0.0])
        assert DiscreteAction(5).direction is Direction.SW

    @pytest.mark.parametrize("index,step", [(8, 0.5), (-1, 0.5), (0, 0.0)])
    def test_validation(self, index: int, step: float) -> None:
        """Test index and step validation."""
        with pytest.raises(ValueError):
            DiscreteAction(index, step)


class TestSimilarity:
    """Test the Gaussian-kernel similarity."""

    def test_identical_states(self) -> None:
        """Test that a state is fully similar to itself."""
        assert similarity(ORIGIN, ORIGIN, 0.5) == 1.0

    def test_value(self) -> None:
        """Test exp(-d^2 / sigma)."""
        assert similarity(shifted(2.0), ORIGIN, 2.0) == pytest.approx(math.exp(-2.0))

    def test_normalization(self) -> None:
        """Test that distances are measured in normalized units."""
        stats = NormStats(
            np.zeros(STATE_DIM), np.full(STATE_DIM, 2.0), np.zeros(2), np.ones(2)
        )
        assert squared_distances(shifted(2.0).values, ORIGIN.values, stats) == pytest.approx(1.0)

    def test_sigma_validation(self) -> None:
        """Test that a non-positive bandwidth is refused."""
        with pytest.raises(ValueError):
            similarity(ORIGIN, ORIGIN, 0.0)
        with pytest.raises(ValueError):
            RewardConfig(sigma=-1.0)

    @pytest.mark.parametrize("epsilon", [0.0, 1.0])
    def test_epsilon_validation(self, epsilon: float) -> None:
        """Test that epsilon must lie strictly inside (0, 1)."""
        with pytest.raises(ValueError):
            RewardConfig(epsilon=epsilon)

    @given(value=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
    def test_range(self, value: float) -> None:
        """Test that similarity stays in [0, 1]."""
        assert 0.0 <= similarity(shifted(value), ORIGIN, 3.0) <= 1.0


class TestReward:
    """Test the sparse goal reward."""

    def test_goal_and_step(self) -> None:
        """Test both reward values."""
        cfg = RewardConfig(sigma=1.0)
        assert reward(ORIGIN, ORIGIN, cfg) == 1.0
        assert reward(shifted(5.0), ORIGIN, cfg) == pytest.approx(-0.02)

    @given(value=st.floats(min_value=0.05, max_value=2.0))
    def test_threshold_is_strict(self, value: float) -> None:
        """Test that a similarity equal to epsilon earns only the step reward."""
        state = shifted(value)
        g = similarity(state, ORIGIN, 1.0)
        at_threshold = RewardConfig(sigma=1.0, epsilon=g)
        below = RewardConfig(sigma=1.0, epsilon=float(np.nextafter(g, 0.0)))
        assert reward(state, ORIGIN, at_threshold) == at_threshold.step_reward
        assert reward(state, ORIGIN, below) == below.goal_reward

    def test_with_sigma(self) -> None:
        """Test copying with a new bandwidth."""
        cfg = RewardConfig().with_sigma(0.3)
        assert cfg.sigma == 0.3
        assert cfg.epsilon == RewardConfig().epsilon


class TestSigmaFromGrid:
    """Test the data-driven bandwidth."""

    def test_half_median(self) -> None:
        """Test half the median squared distance."""
        states = np.zeros((4, STATE_DIM))
        states[:, 0] = [1.0, 2.0, 3.0, 4.0]
        assert sigma_from_grid(tiny_grid(states), ORIGIN) == pytest.approx(0.5 * 6.5)

    def test_falls_back_to_mean(self) -> None:
        """Test the fallback when most points match the goal."""
        states = np.zeros((4, STATE_DIM))
        states[3, 0] = 2.0
        assert sigma_from_grid(tiny_grid(states), ORIGIN) == pytest.approx(2.0)

    def test_all_at_goal(self) -> None:
        """Test the last-resort bandwidth."""
        assert sigma_from_grid(tiny_grid(np.zeros((4, STATE_DIM))), ORIGIN) == 1.0

    def test_probed_grid(self, coarse_grid: GridTable, round_goal: ForceState) -> None:
        """Test that a real grid gives a positive bandwidth."""
        assert sigma_from_grid(coarse_grid, round_goal) > 0.0
