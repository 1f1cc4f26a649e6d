"""
Data package: grid sampling, offline trajectory synthesis and dataset files.

Examples:
    >>> from forcedyn.data import sample_grid, generate_trajectories
    >>> grid = sample_grid(spec, n=9)
    >>> trajectories = generate_trajectories(grid, count=400, steps=10, seed=1)
"""

from .grid import (
    GridTable,
    fraction_mask,
    lattice,
    load_grid,
    nearest_grid_state,
    sample_grid,
    save_grid,
    subsample_grid,
)
from .io import load_dataset, save_dataset
from .trajectories import (
    Trajectory,
    default_action_std,
    generate_trajectories,
    stack_trajectories,
)

__all__ = [
    "GridTable",
    "lattice",
    "sample_grid",
    "fraction_mask",
    "subsample_grid",
    "nearest_grid_state",
    "save_grid",
    "load_grid",
    "Trajectory",
    "default_action_std",
    "generate_trajectories",
    "stack_trajectories",
    "save_dataset",
    "load_dataset",
]
