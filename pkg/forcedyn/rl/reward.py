"""
Force-signature similarity and the sparse goal reward.

Similarity compares a state with the goal state in normalized units,
``exp(-||F - F_g||^2 / sigma)``. The reward is the goal reward when the
similarity exceeds the threshold and a small step penalty otherwise; the
positive value goes to the goal case.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core.constants import GOAL_REWARD, STATE_DIM, STEP_REWARD, SUCCESS_THRESHOLD
from ..data.grid import GridTable
from ..dynamics.model import NormStats
from ..sim.state import ForceState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewardConfig:
    """
    Reward settings.

    Attributes:
        sigma: Similarity bandwidth in squared normalized units
        epsilon: Success threshold on the similarity, in (0, 1)
        goal_reward: Reward when the similarity exceeds epsilon
        step_reward: Reward otherwise
    """

    sigma: float = 1.0
    epsilon: float = SUCCESS_THRESHOLD
    goal_reward: float = GOAL_REWARD
    step_reward: float = STEP_REWARD

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")

    def with_sigma(self, sigma: float) -> "RewardConfig":
        """Copy with a different bandwidth."""
        return replace(self, sigma=sigma)


def _normalized(states: np.ndarray, norm_stats: Optional[NormStats]) -> np.ndarray:
    if norm_stats is None:
        return states
    return norm_stats.normalize_states(states)


def squared_distances(
    states: np.ndarray, goal: np.ndarray, norm_stats: Optional[NormStats] = None
) -> np.ndarray:
    """Squared normalized distance of ``(..., 30)`` states to the goal."""
    diff = _normalized(np.asarray(states, dtype=float), norm_stats) - _normalized(
        np.asarray(goal, dtype=float).reshape(STATE_DIM), norm_stats
    )
    return np.asarray(np.sum(diff * diff, axis=-1))


def similarities(
    states: np.ndarray, goal: np.ndarray, sigma: float, norm_stats: Optional[NormStats] = None
) -> np.ndarray:
    """Vectorized ``similarity``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return np.asarray(np.exp(-squared_distances(states, goal, norm_stats) / sigma))


def similarity(
    state: ForceState, goal: ForceState, sigma: float, norm_stats: Optional[NormStats] = None
) -> float:
    """
    Similarity in (0, 1] between a state and the goal.

    Args:
        state: Observed or predicted state
        goal: Goal state
        sigma: Bandwidth (> 0)
        norm_stats: Normalization of the compared vectors; values are taken
            as already normalized if omitted

    Raises:
        ValueError: If sigma is not positive
    """
    return float(similarities(state.values, goal.values, sigma, norm_stats))


def rewards(
    states: np.ndarray, goal: np.ndarray, cfg: RewardConfig, norm_stats: Optional[NormStats] = None
) -> np.ndarray:
    """Vectorized ``reward``."""
    g = similarities(states, goal, cfg.sigma, norm_stats)
    return np.where(g > cfg.epsilon, cfg.goal_reward, cfg.step_reward)


def reward(
    state: ForceState, goal: ForceState, cfg: RewardConfig, norm_stats: Optional[NormStats] = None
) -> float:
    """Goal reward if ``similarity > epsilon`` (strict), step reward otherwise."""
    return float(rewards(state.values, goal.values, cfg, norm_stats))


def sigma_from_grid(
    grid: GridTable, goal: ForceState, norm_stats: Optional[NormStats] = None
) -> float:
    """
    Bandwidth from a probed grid: half the median squared distance of the
    probed states to the goal.

    Falls back to half the mean of the non-zero distances when more than
    half of the points share the goal signature, and to 1.0 when all do.
    """
    dist2 = squared_distances(grid.probed_states(), goal.values, norm_stats)
    median = float(np.median(dist2))
    if median > 0:
        sigma = 0.5 * median
    else:
        positive = dist2[dist2 > 0]
        sigma = 0.5 * float(positive.mean()) if positive.size else 1.0
    logger.debug("Reward bandwidth for %s: %.6f", grid.hole_id, sigma)
    return sigma
