"""
Offline advantage actor-critic training against a frozen transition model.

Episodes start from probed grid states and every successor state comes from
the transition model, so training never touches the environment. Updates
are synchronous: one episode, one gradient step on the n-step advantage
objective with an entropy bonus.

Usage:
    >>> report = train_offline(policy, model, grid, episodes=3000, goal=goal, seed=5)
    >>> report.trailing_mean_return(200)
"""

# pylint: disable=too-many-locals
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ..core.constants import GRADIENT_CLIP_NORM, RL_EPISODE_HORIZON, STATE_DIM
from ..core.exceptions import DivergenceError
from ..core.instrumentation import log_operation
from ..data.grid import GridTable
from ..dynamics.protocols import TransitionModel
from ..dynamics.training import Adam, clip_gradients
from ..sim.state import ForceState
from .actions import ACTION_COUNT, action_table
from .policy import PolicyModel
from .reward import RewardConfig, rewards, similarities

logger = logging.getLogger(__name__)

StepFunction = Callable[[np.ndarray], np.ndarray]


@dataclass
class Episode:
    """
    One collected rollout.

    Attributes:
        states: ``(L, 30)`` observed states before each action
        actions: ``(L,)`` chosen action indices
        rewards: ``(L,)`` rewards of the resulting states
        final_state: State after the last action
        reached_goal: True if the episode ended on the goal reward
    """

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    final_state: np.ndarray
    reached_goal: bool

    @property
    def total_return(self) -> float:
        """Undiscounted sum of rewards."""
        return float(self.rewards.sum())


@dataclass
class PolicyTrainReport:
    """
    Outcome of policy training.

    Attributes:
        episodes_run: Episodes collected and trained on
        returns: Undiscounted return per episode
        losses: Total loss per episode
        wall_seconds: Elapsed wall-clock time
    """

    episodes_run: int = 0
    returns: List[float] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    wall_seconds: float = 0.0

    def trailing_mean_return(self, window: int, end: Optional[int] = None) -> float:
        """Mean return over the ``window`` episodes ending at ``end`` (default: last)."""
        stop = len(self.returns) if end is None else end
        chunk = self.returns[max(0, stop - window) : stop]
        return float(np.mean(chunk)) if chunk else float("nan")


def collect_episode(
    policy: PolicyModel,
    start_state: np.ndarray,
    step_fn: StepFunction,
    goal: ForceState,
    reward_cfg: RewardConfig,
    horizon: int,
    rng: np.random.Generator,
) -> Episode:
    """
    Roll out the stochastic policy for up to ``horizon`` steps.

    Args:
        policy: Acting policy
        start_state: Raw 30-d start state
        step_fn: Maps a lateral move in mm to the next raw state
        goal: Goal state
        reward_cfg: Reward settings (sigma in the policy's normalized units)
        horizon: Maximum number of actions
        rng: Action sampling source

    Returns:
        Episode; ends early on the goal reward
    """
    moves = action_table(policy.step_size)
    state = np.asarray(start_state, dtype=float).reshape(STATE_DIM)
    states, actions, gains = [], [], []
    reached = False
    for _ in range(horizon):
        probs, _, _ = policy.forward_batch(state)
        action = int(rng.choice(ACTION_COUNT, p=probs[0]))
        next_state = np.asarray(step_fn(moves[action]), dtype=float).reshape(STATE_DIM)
        gain = float(rewards(next_state, goal.values, reward_cfg, policy.norm_stats))
        states.append(state)
        actions.append(action)
        gains.append(gain)
        state = next_state
        if gain == reward_cfg.goal_reward:
            reached = True
            break
    return Episode(
        states=np.array(states).reshape(-1, STATE_DIM),
        actions=np.array(actions, dtype=int),
        rewards=np.array(gains),
        final_state=state,
        reached_goal=reached,
    )


class ModelStepper:
    """Feeds moves through a transition model, carrying its hidden value."""

    def __init__(self, dynamics: TransitionModel, start_state: np.ndarray) -> None:
        self.dynamics = dynamics
        self.state = np.asarray(start_state, dtype=float).reshape(1, STATE_DIM)
        self.hidden = dynamics.initial_hidden(self.state)

    def __call__(self, move: np.ndarray) -> np.ndarray:
        move = np.asarray(move, dtype=float).reshape(1, 2)
        self.state, self.hidden = self.dynamics.forward(self.state, move, self.hidden)
        return np.asarray(self.state[0])


def discounted_returns(gains: np.ndarray, bootstrap: float, discount: float) -> np.ndarray:
    """n-step returns ``R_t = r_t + gamma * R_{t+1}`` seeded with ``bootstrap``."""
    returns = np.zeros(len(gains))
    running = bootstrap
    for t in reversed(range(len(gains))):
        running = gains[t] + discount * running
        returns[t] = running
    return returns


def a2c_update(
    policy: PolicyModel, optimizer: Adam, episode: Episode, episode_index: int = 0
) -> float:
    """
    One actor-critic gradient step on a collected episode.

    Loss: ``-mean(A * log pi(a)) - c_ent * mean(H(pi)) + c_v * mean((R - V)^2)``
    with advantage ``A = R - V`` held constant.

    Returns:
        The loss before the update

    Raises:
        DivergenceError: If the loss is not finite
    """
    cfg = policy.config
    count = len(episode.actions)
    if count == 0:
        return 0.0
    bootstrap = 0.0
    if not episode.reached_goal:
        _, final_value, _ = policy.forward_batch(episode.final_state)
        bootstrap = float(final_value[0])
    returns = discounted_returns(episode.rewards, bootstrap, cfg.discount)

    probs, values, cache = policy.forward_batch(episode.states)
    advantages = returns - values
    picked = probs[np.arange(count), episode.actions]
    log_probs = np.log(probs)
    entropy = -np.sum(probs * log_probs, axis=1)
    loss = float(
        -np.mean(advantages * np.log(picked))
        - cfg.entropy_weight * np.mean(entropy)
        + cfg.value_weight * np.mean(advantages**2)
    )
    if not np.isfinite(loss):
        raise DivergenceError("Policy loss is not finite", episode_index, loss)

    onehot = np.zeros_like(probs)
    onehot[np.arange(count), episode.actions] = 1.0
    d_logits = -advantages[:, None] * (onehot - probs)
    d_logits += cfg.entropy_weight * probs * (log_probs + entropy[:, None])
    d_logits /= count
    d_values = -2.0 * cfg.value_weight * advantages / count

    grads = policy.backward(cache, d_logits, d_values)
    clip_gradients(grads, GRADIENT_CLIP_NORM)
    optimizer.step(policy.params, grads)
    return loss


def initial_indices(
    grid: GridTable, goal: ForceState, reward_cfg: RewardConfig, policy: PolicyModel
) -> np.ndarray:
    """
    Probed lattice indices eligible as episode starts: those not already at
    the goal, or every probed index if all are.
    """
    probed = grid.probed_indices
    g = similarities(grid.states[probed], goal.values, reward_cfg.sigma, policy.norm_stats)
    eligible = probed[g <= reward_cfg.epsilon]
    return eligible if eligible.size else probed


@log_operation(threshold_s=600.0)
def train_offline(
    policy: PolicyModel,
    dynamics: TransitionModel,
    grid: GridTable,
    episodes: int,
    goal: ForceState,
    reward_cfg: Optional[RewardConfig] = None,
    horizon: int = RL_EPISODE_HORIZON,
    seed: int = 0,
    learning_rate: Optional[float] = None,
    log_every: int = 100,
) -> PolicyTrainReport:
    """
    Train a policy entirely against a frozen transition model.

    Args:
        policy: Policy to train in place
        dynamics: Frozen transition model supplying successor states
        grid: Probed grid supplying start states
        episodes: Number of episodes (one update each)
        goal: Goal state of the hole
        reward_cfg: Reward settings; bandwidth defaults to ``policy.sigma``
        horizon: Maximum actions per episode
        seed: Start and action sampling seed
        learning_rate: Adam step size; ``policy.config.learning_rate`` if omitted
        log_every: Return logging period

    Returns:
        PolicyTrainReport

    Raises:
        DivergenceError: If the loss becomes non-finite
    """
    cfg = reward_cfg or RewardConfig(sigma=policy.sigma)
    rng = np.random.default_rng(seed)
    optimizer = Adam(policy.config.learning_rate if learning_rate is None else learning_rate)
    starts = initial_indices(grid, goal, cfg, policy)
    report = PolicyTrainReport()
    started = time.perf_counter()

    for index in range(1, episodes + 1):
        start = grid.states[int(rng.choice(starts))]
        stepper = ModelStepper(dynamics, start)
        episode = collect_episode(policy, start, stepper, goal, cfg, horizon, rng)
        loss = a2c_update(policy, optimizer, episode, index)
        report.returns.append(episode.total_return)
        report.losses.append(loss)
        report.episodes_run = index
        if log_every > 0 and index % log_every == 0:
            logger.info(
                "RL episode %d/%d mean return %.4f",
                index,
                episodes,
                report.trailing_mean_return(log_every),
            )

    report.wall_seconds = time.perf_counter() - started
    return report
