"""
The eight discrete lateral moves of the policy.

Index order is fixed: E, S, W, N, NE, SW, SE, NW. Diagonal moves step
``step_size`` along both axes, so every move is one lattice unit per axis.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..core.constants import DEFAULT_GRID_N, DEFAULT_GRID_RANGE_MM

DEFAULT_STEP_SIZE_MM = DEFAULT_GRID_RANGE_MM / (DEFAULT_GRID_N - 1)


class Direction(IntEnum):
    """Compass directions in policy output order."""

    E = 0
    S = 1
    W = 2
    N = 3
    NE = 4
    SW = 5
    SE = 6
    NW = 7


ACTION_COUNT = len(Direction)

_UNIT_MOVES = np.array(
    [(1, 0), (0, -1), (-1, 0), (0, 1), (1, 1), (-1, -1), (1, -1), (-1, 1)], dtype=float
)


@dataclass(frozen=True)
class DiscreteAction:
    """
    One discrete move.

    Attributes:
        index: Position in the policy output, 0-7
        step_size: Per-axis move length in mm
    """

    index: int
    step_size: float = DEFAULT_STEP_SIZE_MM

    def __post_init__(self) -> None:
        if not 0 <= self.index < ACTION_COUNT:
            raise ValueError(f"Action index must be in [0, {ACTION_COUNT}), got {self.index}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")

    @property
    def direction(self) -> Direction:
        """Compass direction of the move."""
        return Direction(self.index)

    @property
    def vector(self) -> np.ndarray:
        """Lateral move (a_x, a_y) in mm."""
        return _UNIT_MOVES[self.index] * self.step_size


def action_vector(index: int, step_size: float = DEFAULT_STEP_SIZE_MM) -> np.ndarray:
    """Lateral move of an action index."""
    return DiscreteAction(int(index), step_size).vector


def action_table(step_size: float = DEFAULT_STEP_SIZE_MM) -> np.ndarray:
    """All eight moves as an ``(8, 2)`` array in index order."""
    return _UNIT_MOVES * step_size
