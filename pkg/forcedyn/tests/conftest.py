"""
Shared pytest fixtures for forcedyn tests.

Grids here are deliberately coarse (5 x 5 over the default 4 mm range, so the
lattice spacing is 1 mm) and models tiny, so the suite stays fast.
"""

# pylint: disable=redefined-outer-name
# This is intentional - pytest fixtures use parameter names to specify dependencies

import os
from pathlib import Path
from typing import Any, List, Tuple

import numpy as np
import pytest
from hypothesis import settings

from forcedyn.core.constants import RIGID_ELASTICITY, STATE_DIM
from forcedyn.data.grid import GridTable, sample_grid
from forcedyn.data.trajectories import Trajectory, generate_trajectories
from forcedyn.dynamics.model import DynamicsConfig, DynamicsModel, init_model
from forcedyn.geometry.shapes import HoleSpec, ShapeKind
from forcedyn.sim.contact import ContactSimulator, SensorNoise, goal_state
from forcedyn.sim.state import ForceState

COARSE_N = 5
COARSE_RANGE = (4.0, 4.0)

# Property suites run a thousand cases each; HYPOTHESIS_PROFILE=dev trades that for speed.
PROPERTY_EXAMPLES = 1000
settings.register_profile("forcedyn", max_examples=PROPERTY_EXAMPLES, deadline=None)
settings.register_profile("dev", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "forcedyn"))


class LinearTransitionModel:
    """
    Test double whose state holds the peg position in dims 0-1.

    ``forward`` adds the action to the position; every other dim stays zero,
    so a goal state of zeros rewards moving to the origin.
    """

    def initial_hidden(self, states: np.ndarray) -> None:  # pylint: disable=unused-argument
        """No hidden value needed."""
        return None

    def forward(
        self, states: np.ndarray, actions: np.ndarray, hidden: Any
    ) -> Tuple[np.ndarray, Any]:
        """Shift the position dims by the action."""
        nxt = np.array(states, dtype=float).reshape(-1, STATE_DIM)
        nxt[:, :2] += np.asarray(actions, dtype=float).reshape(-1, 2)
        return nxt, hidden


def position_state(x: float, y: float) -> np.ndarray:
    """A 30-d state carrying a position in its first two dims."""
    values = np.zeros(STATE_DIM)
    values[:2] = (x, y)
    return values


@pytest.fixture(scope="session")
def round_spec() -> HoleSpec:
    """Rigid 15 mm round hole."""
    return HoleSpec(kind=ShapeKind.ROUND, size=15.0, elasticity=RIGID_ELASTICITY)


@pytest.fixture(scope="session")
def square_spec() -> HoleSpec:
    """Rigid 15 mm square hole."""
    return HoleSpec(kind=ShapeKind.SQUARE, size=15.0, elasticity=RIGID_ELASTICITY)


@pytest.fixture(scope="session")
def coarse_grid(round_spec: HoleSpec) -> GridTable:
    """Fully probed 5 x 5 grid of the round hole."""
    return sample_grid(round_spec, n=COARSE_N, grid_range=COARSE_RANGE)


@pytest.fixture(scope="session")
def round_goal(round_spec: HoleSpec) -> ForceState:
    """Goal state of the round hole."""
    return goal_state(round_spec)


@pytest.fixture
def quiet_simulator(round_spec: HoleSpec) -> ContactSimulator:
    """Noise-free simulator of the round hole with a fresh probe counter."""
    return ContactSimulator(round_spec, noise=SensorNoise.off())


@pytest.fixture
def trajectories(coarse_grid: GridTable) -> List[Trajectory]:
    """Twelve 4-step trajectories over the coarse grid."""
    return generate_trajectories(coarse_grid, 12, steps=4, seed=3)


@pytest.fixture
def small_model() -> DynamicsModel:
    """Untrained dynamics model with H = 4."""
    return init_model(DynamicsConfig(hidden_size=4), seed=0)


@pytest.fixture
def linear_model() -> LinearTransitionModel:
    """Position-integrating transition model."""
    return LinearTransitionModel()


@pytest.fixture
def run_dir(tmp_path: Path) -> Path:
    """Empty run directory path (not yet created)."""
    return tmp_path / "run"
