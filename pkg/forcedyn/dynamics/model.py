"""
Learned force dynamics: a normalized two-layer LSTM predicting the next
multi-pose force state from the current state and a lateral action.

Usage:
    >>> model = init_model(DynamicsConfig(hidden_size=64), seed=3)
    >>> model.fit_norm_stats(states, actions)
    >>> next_state, hidden = forward(model, state, (0.5, 0.0))
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.constants import (
    ACTION_DIM,
    DEFAULT_HIDDEN_SIZE,
    DEFAULT_LEARNING_RATE,
    FORCE_DIMS,
    NORM_STD_FLOOR,
    STATE_DIM,
)
from ..sim.state import ForceState
from . import lstm
from .lstm import LSTMState, Params

logger = logging.getLogger(__name__)

# Dims whose spread is below this share of their group's median spread are
# treated as constant when normalizing.
RELATIVE_STD_FLOOR = 0.01


@dataclass(frozen=True)
class DynamicsConfig:
    """
    Hyperparameters of the dynamics model.

    Attributes:
        hidden_size: LSTM width H of both layers
        learning_rate: Adam step size for pretraining
        seed: Initialization seed
    """

    hidden_size: int = DEFAULT_HIDDEN_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be at least 1, got {self.hidden_size}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")


def _floored_std(values: np.ndarray, groups: Sequence[slice]) -> np.ndarray:
    std = values.std(axis=0)
    floored = np.maximum(std, NORM_STD_FLOOR)
    for group in groups:
        reference = float(np.median(std[group]))
        floored[group] = np.maximum(floored[group], RELATIVE_STD_FLOOR * reference)
    return floored


@dataclass(frozen=True, eq=False)
class NormStats:
    """
    Per-dimension mean and standard deviation of states and actions.

    Standard deviations are at least NORM_STD_FLOOR, and at least a small
    share of the median spread of their force or torque group.
    """

    state_mean: np.ndarray
    state_std: np.ndarray
    action_mean: np.ndarray
    action_std: np.ndarray

    def __post_init__(self) -> None:
        shapes = {
            "state_mean": (STATE_DIM,),
            "state_std": (STATE_DIM,),
            "action_mean": (ACTION_DIM,),
            "action_std": (ACTION_DIM,),
        }
        for name, shape in shapes.items():
            array = getattr(self, name)
            if array.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {array.shape}")
        if np.any(self.state_std < NORM_STD_FLOOR) or np.any(self.action_std < NORM_STD_FLOOR):
            raise ValueError("NormStats standard deviations must be floored")

    @classmethod
    def identity(cls) -> "NormStats":
        """Zero mean, unit std."""
        return cls(
            np.zeros(STATE_DIM), np.ones(STATE_DIM), np.zeros(ACTION_DIM), np.ones(ACTION_DIM)
        )

    @classmethod
    def from_data(cls, states: np.ndarray, actions: np.ndarray) -> "NormStats":
        """
        Fit statistics to ``(..., 30)`` states and ``(..., 2)`` actions.

        Raises:
            ValueError: If either array is empty
        """
        flat_states = np.asarray(states, dtype=float).reshape(-1, STATE_DIM)
        flat_actions = np.asarray(actions, dtype=float).reshape(-1, ACTION_DIM)
        if flat_states.size == 0 or flat_actions.size == 0:
            raise ValueError("Cannot fit normalization to empty data")
        state_groups = (slice(0, FORCE_DIMS), slice(FORCE_DIMS, STATE_DIM))
        return cls(
            state_mean=flat_states.mean(axis=0),
            state_std=_floored_std(flat_states, state_groups),
            action_mean=flat_actions.mean(axis=0),
            action_std=_floored_std(flat_actions, ()),
        )

    def normalize_states(self, states: np.ndarray) -> np.ndarray:
        """Map raw states to normalized units."""
        return (np.asarray(states, dtype=float) - self.state_mean) / self.state_std

    def denormalize_states(self, states: np.ndarray) -> np.ndarray:
        """Map normalized states back to raw units."""
        return np.asarray(states, dtype=float) * self.state_std + self.state_mean

    def normalize_actions(self, actions: np.ndarray) -> np.ndarray:
        """Map raw actions in mm to normalized units."""
        return (np.asarray(actions, dtype=float) - self.action_mean) / self.action_std


class DynamicsModel:
    """
    Two-layer LSTM dynamics model over normalized states and actions.

    Implements the TransitionModel protocol: ``forward`` works on raw
    ``(B, 30)`` states and ``(B, 2)`` actions.
    """

    def __init__(self, config: DynamicsConfig, params: Params, norm_stats: NormStats) -> None:
        missing = [name for name in lstm.PARAM_ORDER if name not in params]
        if missing:
            raise ValueError(f"Missing parameters: {missing}")
        self.config = config
        self.params = params
        self.norm_stats = norm_stats

    @property
    def hidden_size(self) -> int:
        """LSTM width H."""
        return self.config.hidden_size

    @property
    def parameter_count(self) -> int:
        """Total number of scalar parameters."""
        return int(sum(self.params[name].size for name in lstm.PARAM_ORDER))

    def fit_norm_stats(self, states: np.ndarray, actions: np.ndarray) -> NormStats:
        """Refit the normalization to training data and return it."""
        self.norm_stats = NormStats.from_data(states, actions)
        return self.norm_stats

    def network_inputs(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """Concatenate normalized states and actions along the last axis."""
        return np.concatenate(
            [self.norm_stats.normalize_states(states), self.norm_stats.normalize_actions(actions)],
            axis=-1,
        )

    def initial_hidden(self, states: np.ndarray) -> LSTMState:
        """Zero LSTM state for a batch of start states."""
        batch = np.asarray(states).reshape(-1, STATE_DIM).shape[0]
        return lstm.zero_state(batch, self.hidden_size)

    def forward(
        self, states: np.ndarray, actions: np.ndarray, hidden: Any
    ) -> Tuple[np.ndarray, LSTMState]:
        """One-step prediction in raw units for a batch."""
        x = self.network_inputs(
            np.asarray(states, dtype=float).reshape(-1, STATE_DIM),
            np.asarray(actions, dtype=float).reshape(-1, ACTION_DIM),
        )
        output, next_hidden = lstm.step(self.params, x, hidden)
        return self.norm_stats.denormalize_states(output), next_hidden

    def predict_sequence(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """
        Teacher-forced predictions for whole sequences.

        Args:
            states: ``(B, T+1, 30)`` or ``(B, T, 30)`` ground-truth states; only
                the first T are fed
            actions: ``(B, T, 2)`` actions

        Returns:
            ``(B, T, 30)`` predicted successor states in raw units
        """
        steps = actions.shape[1]
        inputs = self.network_inputs(states[:, :steps], actions)
        outputs, _, _ = lstm.sequence_forward(
            self.params, inputs, lstm.zero_state(inputs.shape[0], self.hidden_size)
        )
        return self.norm_stats.denormalize_states(outputs)

    def copy(self) -> "DynamicsModel":
        """Deep copy of parameters and statistics."""
        stats = self.norm_stats
        return DynamicsModel(
            replace(self.config),
            {name: array.copy() for name, array in self.params.items()},
            NormStats(
                stats.state_mean.copy(),
                stats.state_std.copy(),
                stats.action_mean.copy(),
                stats.action_std.copy(),
            ),
        )


def init_model(
    config: Optional[DynamicsConfig] = None, seed: Optional[int] = None
) -> DynamicsModel:
    """
    Build an untrained model with identity normalization.

    Args:
        config: Hyperparameters; defaults if omitted
        seed: Initialization seed; ``config.seed`` if omitted

    Returns:
        DynamicsModel, deterministic per seed
    """
    config = config or DynamicsConfig()
    if seed is not None:
        config = replace(config, seed=seed)
    rng = np.random.default_rng(config.seed)
    params = lstm.init_params(STATE_DIM + ACTION_DIM, config.hidden_size, STATE_DIM, rng)
    logger.debug("Initialized dynamics model H=%d seed=%d", config.hidden_size, config.seed)
    return DynamicsModel(config, params, NormStats.identity())


def forward(
    model: DynamicsModel,
    state: ForceState,
    action: Union[Sequence[float], np.ndarray],
    hidden: Optional[LSTMState] = None,
) -> Tuple[ForceState, LSTMState]:
    """
    Single-state convenience wrapper around ``DynamicsModel.forward``.

    Args:
        model: Dynamics model
        state: Current force state
        action: Lateral move (a_x, a_y) in mm
        hidden: LSTM state; a fresh zero state if omitted

    Returns:
        (predicted next ForceState, next hidden state)
    """
    values = state.values.reshape(1, STATE_DIM)
    if hidden is None:
        hidden = model.initial_hidden(values)
    prediction, next_hidden = model.forward(
        values, np.asarray(action, dtype=float).reshape(1, ACTION_DIM), hidden
    )
    return ForceState(prediction[0]), next_hidden
