"""
Ground-truth dynamics backed by a probed grid.

GridOracleDynamics answers the same one-step queries as the learned model
but with exact nearest-grid states: its hidden value is the believed
position, localized once from the start state. Substituting it for the
learned model separates planner quality from model quality.

Inserted lattice points are absorbing. A trial ends as soon as the peg drops
into the hole, so a rollout that reaches an inserted point keeps the inserted
state for the rest of the horizon instead of wandering back onto the plate.
"""

import logging
from typing import Tuple

import numpy as np

from ..core.constants import ACTION_DIM, STATE_DIM
from ..data.grid import GridTable
from ..sim.contact import inserted_signature
from .evaluation import weighted_error

logger = logging.getLogger(__name__)


class GridOracleDynamics:
    """TransitionModel whose predictions are nearest-grid lookups."""

    def __init__(self, grid: GridTable) -> None:
        self.grid = grid
        self._indices = grid.probed_indices
        self._states = grid.states[self._indices]
        # Candidates closest to the hole center first, then by lattice index.
        radius = np.linalg.norm(grid.positions[self._indices], axis=1)
        self._preference = np.lexsort((self._indices, radius))
        signature = inserted_signature(grid.f_max).values
        self.inserted = np.all(np.isclose(grid.states, signature, rtol=0.0, atol=1e-9), axis=1)
        logger.debug(
            "Grid oracle over %d probed points of %s, %d inserted",
            len(self._indices),
            grid.hole_id,
            int(self.inserted.sum()),
        )

    def localize(self, states: np.ndarray) -> np.ndarray:
        """
        Probed positions whose states best match ``(B, 30)`` states.

        Matching uses the force-plus-weighted-torque error; exact ties go to
        the point nearest the hole center.
        """
        query = np.asarray(states, dtype=float).reshape(-1, STATE_DIM)
        errors = weighted_error(query[:, None, :], self._states[None, :, :])
        ordered = errors[:, self._preference]
        best = self._preference[np.argmin(ordered, axis=1)]
        return np.array(self.grid.positions[self._indices[best]])

    def initial_hidden(self, states: np.ndarray) -> np.ndarray:
        """Believed ``(B, 2)`` positions of the start states."""
        return self.localize(states)

    def forward(  # pylint: disable=unused-argument
        self, states: np.ndarray, actions: np.ndarray, hidden: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Move the believed positions and look up their nearest-grid states.

        Positions whose nearest probed point is inserted do not move.
        """
        believed = np.asarray(hidden, dtype=float).reshape(-1, ACTION_DIM)
        moves = np.asarray(actions, dtype=float).reshape(-1, ACTION_DIM)
        held = self.inserted[self.grid.nearest_indices(believed)]
        positions = self.grid.clamp(np.where(held[:, None], believed, believed + moves))
        return np.array(self.grid.states[self.grid.nearest_indices(positions)]), positions
