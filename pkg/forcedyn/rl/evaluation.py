"""
Greedy policy evaluation on the contact simulator.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..control.mpc import ActionChooser, TrialResult, run_trials, success_rate
from ..core.constants import DEFAULT_GRID_RANGE_MM, DEFAULT_MAX_STEPS, DEFAULT_SUCCESS_RADIUS_MM
from ..sim.contact import ContactSimulator
from ..sim.state import ForceState
from .actions import action_vector
from .policy import PolicyModel

logger = logging.getLogger(__name__)


@dataclass
class PolicyEvaluation:
    """
    Outcome of a batch of greedy policy trials.

    Attributes:
        success_rate: Fraction of successful trials
        trials: Per-trial results in trial order
    """

    success_rate: float
    trials: List[TrialResult] = field(default_factory=list)

    @property
    def mean_steps(self) -> float:
        """Mean number of actions taken."""
        if not self.trials:
            return float("nan")
        return float(np.mean([trial.steps_taken for trial in self.trials]))


def greedy_chooser(policy: PolicyModel) -> ActionChooser:
    """Adapt a policy to the episode runner, picking the most probable move."""

    def choose(state: ForceState, rng: np.random.Generator) -> np.ndarray:
        # pylint: disable=unused-argument
        return action_vector(policy.greedy_action(state), policy.step_size)

    return choose


def eval_policy(
    simulator: ContactSimulator,
    policy: PolicyModel,
    goal: ForceState,
    trials: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM,
    seed: int = 0,
    grid_range: Tuple[float, float] = (DEFAULT_GRID_RANGE_MM, DEFAULT_GRID_RANGE_MM),
) -> PolicyEvaluation:
    """
    Run greedy policy trials from ring start offsets.

    Each step probes the simulator with sensor noise, applies the argmax
    action and re-probes. Trial starts follow ``run_trials``, so a policy
    and a planner evaluated with the same seed face the same offsets.

    Args:
        simulator: Environment stand-in for the evaluated hole
        policy: Trained policy
        goal: Goal state of the hole
        trials: Number of trials
        max_steps: Action budget per trial
        success_radius: Distance counted as aligned
        seed: Root seed of the batch
        grid_range: Range the start offsets must lie in

    Returns:
        PolicyEvaluation
    """
    results = run_trials(
        simulator,
        greedy_chooser(policy),
        goal,
        trials,
        seed=seed,
        max_steps=max_steps,
        success_radius=success_radius,
        grid_range=grid_range,
    )
    rate = success_rate(results)
    logger.info("Policy success rate %.3f over %d trials", rate, trials)
    return PolicyEvaluation(success_rate=rate, trials=results)
