"""
Offline trajectory synthesis.

A trajectory starts at a probed lattice point and follows random Gaussian
actions; positions are clamped to the grid range and every position is
labeled with the state of its nearest probed point. No probing happens here,
so any number of trajectories costs nothing beyond the grid itself.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..core.constants import ACTION_DIM, DEFAULT_TRAJECTORY_STEPS, STATE_DIM
from ..sim.state import ForceState
from .grid import GridTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    One synthesized state-action sequence.

    Attributes:
        actions: (T, 2) effective actions in mm (after range clamping)
        positions: (T+1, 2) offsets in mm
        states: (T+1, 30) ground-truth states
        hole_id: Hole the states come from
    """

    actions: np.ndarray
    positions: np.ndarray
    states: np.ndarray
    hole_id: str = ""

    def __post_init__(self) -> None:
        steps = self.actions.shape[0]
        if self.actions.shape != (steps, ACTION_DIM):
            raise ValueError(f"actions must have shape (T, {ACTION_DIM})")
        if self.positions.shape != (steps + 1, 2):
            raise ValueError("positions must have one more row than actions")
        if self.states.shape != (steps + 1, STATE_DIM):
            raise ValueError(f"states must have shape (T+1, {STATE_DIM})")

    @property
    def steps(self) -> int:
        """Number of actions T."""
        return int(self.actions.shape[0])

    @property
    def start(self) -> np.ndarray:
        """Initial offset."""
        return self.positions[0]

    def state(self, t: int) -> ForceState:
        """State at step t."""
        return ForceState(self.states[t])


def default_action_std(grid: GridTable) -> Tuple[float, float]:
    """Half the lattice spacing per axis."""
    sx, sy = grid.spacing
    return (sx / 2.0, sy / 2.0)


def generate_trajectories(
    grid: GridTable,
    count: int,
    steps: int = DEFAULT_TRAJECTORY_STEPS,
    action_std: Optional[Tuple[float, float]] = None,
    seed: int = 0,
) -> List[Trajectory]:
    """
    Synthesize random trajectories over a probed grid.

    Args:
        grid: Probed grid supplying starts and ground-truth states
        count: Number of trajectories
        steps: Actions per trajectory T (>= 1)
        action_std: Per-axis Gaussian std in mm; half the spacing if omitted
        seed: Seed of the start and action draws

    Returns:
        ``count`` trajectories, deterministic given the arguments

    Raises:
        ValueError: If steps < 1, count < 0 or a std is negative
    """
    if steps < 1:
        raise ValueError(f"Trajectories need at least one step, got {steps}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    std = np.asarray(action_std if action_std is not None else default_action_std(grid))
    if std.shape != (2,) or np.any(std < 0):
        raise ValueError(f"action_std must be two non-negative values, got {action_std}")

    rng = np.random.default_rng(seed)
    starts = grid.probed_indices
    trajectories = []
    for _ in range(count):
        positions = np.empty((steps + 1, 2))
        positions[0] = grid.positions[rng.choice(starts)]
        raw = rng.normal(0.0, 1.0, size=(steps, 2)) * std
        for t in range(steps):
            positions[t + 1] = grid.clamp(positions[t] + raw[t])
        states = grid.states[grid.nearest_indices(positions)]
        trajectories.append(
            Trajectory(
                actions=np.diff(positions, axis=0),
                positions=positions,
                states=states,
                hole_id=grid.hole_id,
            )
        )
    logger.debug("Generated %d trajectories of %d steps for %s", count, steps, grid.hole_id)
    return trajectories


def stack_trajectories(trajectories: List[Trajectory]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stack equal-length trajectories into batch arrays.

    Returns:
        (states, actions) with shapes (B, T+1, 30) and (B, T, 2)

    Raises:
        ValueError: If the list is empty or lengths differ
    """
    if not trajectories:
        raise ValueError("No trajectories to stack")
    lengths = {traj.steps for traj in trajectories}
    if len(lengths) != 1:
        raise ValueError(f"Trajectories have different lengths: {sorted(lengths)}")
    states = np.stack([traj.states for traj in trajectories])
    actions = np.stack([traj.actions for traj in trajectories])
    return states, actions
