"""
Online actor-critic baseline that learns directly on the contact simulator.

Uses the same episode collection and update as offline training, but every
successor state comes from a fresh multi-pose probe. The simulator's probe
counter measures how much environment interaction the policy needed before
its greedy evaluation reached a target success rate, for comparison with the
grid probes of the offline pipeline.

Usage:
    >>> report = train_online(policy, simulator, goal, episodes=5000, seed=3)
    >>> report.training_probes, report.reached
"""

# pylint: disable=too-many-locals
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..control.mpc import sample_start_offset
from ..core.constants import (
    DEFAULT_GRID_RANGE_MM,
    DEFAULT_MAX_STEPS,
    DEFAULT_SUCCESS_RADIUS_MM,
    RL_EPISODE_HORIZON,
)
from ..core.instrumentation import log_operation
from ..core.seeding import derive_seed, make_rng
from ..dynamics.training import Adam
from ..sim.contact import ContactSimulator
from ..sim.state import ForceState
from .a2c import a2c_update, collect_episode
from .evaluation import eval_policy
from .policy import PolicyModel
from .reward import RewardConfig

logger = logging.getLogger(__name__)


@dataclass
class OnlineReport:
    """
    Outcome of online training.

    Attributes:
        episodes_run: Episodes collected and trained on
        training_probes: Simulator probes spent collecting episodes
        evaluation_probes: Simulator probes spent on greedy evaluations
        success_history: ``(episode, success rate)`` per evaluation
        returns: Undiscounted return per episode
        reached: True if an evaluation met the target success rate
        wall_seconds: Elapsed wall-clock time
    """

    episodes_run: int = 0
    training_probes: int = 0
    evaluation_probes: int = 0
    success_history: List[Tuple[int, float]] = field(default_factory=list)
    returns: List[float] = field(default_factory=list)
    reached: bool = False
    wall_seconds: float = 0.0


class SimulatorStepper:
    """Tracks the peg offset and probes the simulator after every move."""

    def __init__(
        self, simulator: ContactSimulator, start_offset: np.ndarray, rng: np.random.Generator
    ) -> None:
        self.simulator = simulator
        self.rng = rng
        self.position = np.asarray(start_offset, dtype=float).reshape(2).copy()

    def observe(self) -> np.ndarray:
        """Probe the current offset."""
        return self.simulator.probe(self.position, self.rng).state.values

    def __call__(self, move: np.ndarray) -> np.ndarray:
        self.position = self.position + np.asarray(move, dtype=float).reshape(2)
        return self.observe()


@log_operation(threshold_s=600.0)
def train_online(
    policy: PolicyModel,
    simulator: ContactSimulator,
    goal: ForceState,
    episodes: int,
    reward_cfg: Optional[RewardConfig] = None,
    horizon: int = RL_EPISODE_HORIZON,
    seed: int = 0,
    eval_every: int = 100,
    eval_trials: int = 20,
    target_success: float = 0.85,
    max_steps: int = DEFAULT_MAX_STEPS,
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM,
    grid_range: Tuple[float, float] = (DEFAULT_GRID_RANGE_MM, DEFAULT_GRID_RANGE_MM),
    learning_rate: Optional[float] = None,
) -> OnlineReport:
    """
    Train a policy against the simulator until it reaches ``target_success``.

    Episodes start on the same offset ring as the controller trials. Every
    ``eval_every`` episodes the greedy policy is evaluated on ``eval_trials``
    trials; training stops at the first evaluation meeting the target.

    Args:
        policy: Policy to train in place
        simulator: Environment; its probe counter is read, not reset
        goal: Goal state of the hole
        episodes: Episode budget
        reward_cfg: Reward settings; bandwidth defaults to ``policy.sigma``
        horizon: Maximum actions per episode
        seed: Root seed
        eval_every: Evaluation period in episodes (0 disables evaluation)
        eval_trials: Trials per evaluation
        target_success: Success rate that ends training
        max_steps: Action budget of evaluation trials
        success_radius: Distance counted as aligned in evaluations
        grid_range: Range the start offsets must lie in
        learning_rate: Adam step size; ``policy.config.learning_rate`` if omitted

    Returns:
        OnlineReport

    Raises:
        DivergenceError: If the loss becomes non-finite
    """
    cfg = reward_cfg or RewardConfig(sigma=policy.sigma)
    rng = make_rng(seed, "online", "episodes")
    optimizer = Adam(policy.config.learning_rate if learning_rate is None else learning_rate)
    report = OnlineReport()
    started = time.perf_counter()

    for index in range(1, episodes + 1):
        before = simulator.probe_count
        stepper = SimulatorStepper(simulator, sample_start_offset(rng, grid_range=grid_range), rng)
        episode = collect_episode(policy, stepper.observe(), stepper, goal, cfg, horizon, rng)
        a2c_update(policy, optimizer, episode, index)
        report.training_probes += simulator.probe_count - before
        report.returns.append(episode.total_return)
        report.episodes_run = index

        if eval_every > 0 and index % eval_every == 0:
            before = simulator.probe_count
            evaluation = eval_policy(
                simulator,
                policy,
                goal,
                eval_trials,
                max_steps=max_steps,
                success_radius=success_radius,
                seed=derive_seed(seed, "online", "eval", index),
                grid_range=grid_range,
            )
            report.evaluation_probes += simulator.probe_count - before
            report.success_history.append((index, evaluation.success_rate))
            logger.info(
                "Online episode %d/%d success %.3f after %d probes",
                index,
                episodes,
                evaluation.success_rate,
                report.training_probes,
            )
            if evaluation.success_rate >= target_success:
                report.reached = True
                break

    report.wall_seconds = time.perf_counter() - started
    return report
