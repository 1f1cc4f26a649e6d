"""
Actor-critic policy network.

Two tanh MLPs read the normalized 30-d force state: the actor maps it to
eight action logits, the critic to a scalar value. Normalization statistics
come from the dynamics model the policy is trained against.

Usage:
    >>> policy = init_policy(PolicyConfig(), model.norm_stats, sigma=0.8)
    >>> probs, value = policy_forward(policy, state)
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..core.constants import (
    DEFAULT_HIDDEN_SIZE,
    DEFAULT_LEARNING_RATE,
    DISCOUNT,
    ENTROPY_WEIGHT,
    STATE_DIM,
    VALUE_LOSS_WEIGHT,
)
from ..core.exceptions import ModelFormatError
from ..dynamics.model import NormStats
from ..dynamics.serialization import NORM_ARRAYS, load_container, require_arrays, save_container
from ..sim.state import ForceState
from .actions import ACTION_COUNT, DEFAULT_STEP_SIZE_MM

logger = logging.getLogger(__name__)

POLICY_PARAMS = ("Wa1", "ba1", "Wa2", "ba2", "Wc1", "bc1", "Wc2", "bc2")
OUTPUT_INIT_SCALE = 0.01


@dataclass(frozen=True)
class PolicyConfig:
    """
    Policy hyperparameters.

    Attributes:
        hidden_size: Width of both hidden layers
        learning_rate: Adam step size
        discount: Return discount gamma
        entropy_weight: Entropy bonus weight
        value_weight: Critic loss weight
        step_size: Per-axis move length in mm
        seed: Initialization seed
    """

    hidden_size: int = DEFAULT_HIDDEN_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    discount: float = DISCOUNT
    entropy_weight: float = ENTROPY_WEIGHT
    value_weight: float = VALUE_LOSS_WEIGHT
    step_size: float = DEFAULT_STEP_SIZE_MM
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be at least 1, got {self.hidden_size}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError(f"discount must be in [0, 1], got {self.discount}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")


class PolicyCache(NamedTuple):
    """Activations kept for the backward pass."""

    inputs: np.ndarray
    actor_hidden: np.ndarray
    critic_hidden: np.ndarray
    probs: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return np.asarray(exp / exp.sum(axis=-1, keepdims=True))


class PolicyModel:
    """Actor and critic MLPs over normalized force states."""

    def __init__(
        self,
        config: PolicyConfig,
        params: Dict[str, np.ndarray],
        norm_stats: NormStats,
        sigma: float,
    ) -> None:
        missing = [name for name in POLICY_PARAMS if name not in params]
        if missing:
            raise ValueError(f"Missing policy parameters: {missing}")
        self.config = config
        self.params = params
        self.norm_stats = norm_stats
        self.sigma = sigma

    @property
    def step_size(self) -> float:
        """Per-axis move length in mm."""
        return self.config.step_size

    def forward_batch(self, states: np.ndarray) -> Tuple[np.ndarray, np.ndarray, PolicyCache]:
        """
        Action distributions and values for raw ``(B, 30)`` states.

        Returns:
            (probs ``(B, 8)``, values ``(B,)``, cache)
        """
        p = self.params
        x = self.norm_stats.normalize_states(np.asarray(states, dtype=float).reshape(-1, STATE_DIM))
        actor_hidden = np.tanh(x @ p["Wa1"] + p["ba1"])
        probs = softmax(actor_hidden @ p["Wa2"] + p["ba2"])
        critic_hidden = np.tanh(x @ p["Wc1"] + p["bc1"])
        values = (critic_hidden @ p["Wc2"] + p["bc2"])[:, 0]
        return probs, values, PolicyCache(x, actor_hidden, critic_hidden, probs)

    def backward(
        self, cache: PolicyCache, d_logits: np.ndarray, d_values: np.ndarray
    ) -> Dict[str, np.ndarray]:
        """Parameter gradients from logit and value gradients."""
        p = self.params
        grads = {
            "Wa2": cache.actor_hidden.T @ d_logits,
            "ba2": d_logits.sum(axis=0),
        }
        d_actor = (d_logits @ p["Wa2"].T) * (1.0 - cache.actor_hidden**2)
        grads["Wa1"] = cache.inputs.T @ d_actor
        grads["ba1"] = d_actor.sum(axis=0)

        d_out = d_values.reshape(-1, 1)
        grads["Wc2"] = cache.critic_hidden.T @ d_out
        grads["bc2"] = d_out.sum(axis=0)
        d_critic = (d_out @ p["Wc2"].T) * (1.0 - cache.critic_hidden**2)
        grads["Wc1"] = cache.inputs.T @ d_critic
        grads["bc1"] = d_critic.sum(axis=0)
        return grads

    def greedy_action(self, state: Union[ForceState, np.ndarray]) -> int:
        """Most probable action index (lowest index on ties)."""
        values = state.values if isinstance(state, ForceState) else np.asarray(state)
        probs, _, _ = self.forward_batch(values)
        return int(np.argmax(probs[0]))

    def copy(self) -> "PolicyModel":
        """Deep copy of the parameters."""
        return PolicyModel(
            replace(self.config),
            {name: array.copy() for name, array in self.params.items()},
            self.norm_stats,
            self.sigma,
        )


def init_policy(
    config: Optional[PolicyConfig] = None,
    norm_stats: Optional[NormStats] = None,
    sigma: float = 1.0,
    seed: Optional[int] = None,
) -> PolicyModel:
    """
    Build an untrained policy.

    Hidden layers are uniform in ``+-1/sqrt(fan_in)``; output layers are
    scaled down so the initial distribution is close to uniform.
    """
    config = config or PolicyConfig()
    if seed is not None:
        config = replace(config, seed=seed)
    rng = np.random.default_rng(config.seed)
    h = config.hidden_size

    def uniform(rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
        bound = scale / np.sqrt(rows)
        return rng.uniform(-bound, bound, size=(rows, cols))

    params = {
        "Wa1": uniform(STATE_DIM, h),
        "ba1": np.zeros(h),
        "Wa2": uniform(h, ACTION_COUNT, OUTPUT_INIT_SCALE),
        "ba2": np.zeros(ACTION_COUNT),
        "Wc1": uniform(STATE_DIM, h),
        "bc1": np.zeros(h),
        "Wc2": uniform(h, 1, OUTPUT_INIT_SCALE),
        "bc2": np.zeros(1),
    }
    return PolicyModel(config, params, norm_stats or NormStats.identity(), sigma)


def policy_forward(policy: PolicyModel, state: ForceState) -> Tuple[np.ndarray, float]:
    """
    Action distribution and value estimate of one state.

    Returns:
        (probabilities over the 8 actions, value)
    """
    probs, values, _ = policy.forward_batch(state.values)
    return probs[0], float(values[0])


def save_policy(policy: PolicyModel, path: Union[str, Path]) -> None:
    """Write a policy in the model container format."""
    stats = policy.norm_stats
    arrays = {
        "state_mean": stats.state_mean,
        "state_std": stats.state_std,
        "action_mean": stats.action_mean,
        "action_std": stats.action_std,
    }
    arrays.update((name, policy.params[name]) for name in POLICY_PARAMS)
    cfg = policy.config
    config = {
        "hidden_size": cfg.hidden_size,
        "learning_rate": float(cfg.learning_rate),
        "discount": float(cfg.discount),
        "entropy_weight": float(cfg.entropy_weight),
        "value_weight": float(cfg.value_weight),
        "step_size": float(cfg.step_size),
        "seed": cfg.seed,
        "sigma": float(policy.sigma),
    }
    save_container(path, "policy", config, arrays)
    logger.info("Saved policy to %s", path)


def load_policy(path: Union[str, Path]) -> PolicyModel:
    """
    Read a policy written by ``save_policy``.

    Raises:
        FileNotFoundError: If the file does not exist
        ModelVersionError: On a wrong header
        ModelFormatError: On missing or corrupt content
    """
    source = str(path)
    text, arrays = load_container(path, "policy")
    require_arrays(arrays, NORM_ARRAYS + POLICY_PARAMS, source)
    try:
        config = PolicyConfig(
            hidden_size=int(text["hidden_size"]),
            learning_rate=float(text["learning_rate"]),
            discount=float(text["discount"]),
            entropy_weight=float(text["entropy_weight"]),
            value_weight=float(text["value_weight"]),
            step_size=float(text["step_size"]),
            seed=int(text["seed"]),
        )
        sigma = float(text["sigma"])
        stats = NormStats(*(arrays[name] for name in NORM_ARRAYS))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"Invalid policy configuration: {exc}", path=source) from exc

    params = {name: arrays[name] for name in POLICY_PARAMS}
    expected = init_policy(config, stats, sigma).params
    for name in POLICY_PARAMS:
        if params[name].shape != expected[name].shape:
            raise ModelFormatError(f"Policy parameter {name} has the wrong shape", path=source)
    return PolicyModel(config, params, stats, sigma)
