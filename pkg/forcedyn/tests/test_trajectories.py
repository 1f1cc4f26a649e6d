"""
Tests for offline trajectory synthesis and dataset files.
"""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from forcedyn.core.exceptions import DatasetFormatError
from forcedyn.data.grid import GridTable, subsample_grid
from forcedyn.data.io import load_dataset, save_dataset
from forcedyn.data.trajectories import (
    Trajectory,
    default_action_std,
    generate_trajectories,
    stack_trajectories,
)


class TestGenerateTrajectories:
    """Test random trajectories over a probed grid."""

    def test_shapes(self, trajectories: List[Trajectory]) -> None:
        """Test count, length and array shapes."""
        assert len(trajectories) == 12
        traj = trajectories[0]
        assert traj.steps == 4
        assert traj.actions.shape == (4, 2)
        assert traj.positions.shape == (5, 2)
        assert traj.states.shape == (5, 30)
        assert traj.hole_id == "round-15"

    def test_starts_on_probed_points(
        self, coarse_grid: GridTable, trajectories: List[Trajectory]
    ) -> None:
        """Test that every trajectory starts on a lattice point."""
        for traj in trajectories:
            assert np.min(np.linalg.norm(coarse_grid.positions - traj.start, axis=1)) == 0.0

    def test_actions_are_position_differences(self, trajectories: List[Trajectory]) -> None:
        """Test that effective actions are the clamped moves actually made."""
        for traj in trajectories:
            np.testing.assert_allclose(np.diff(traj.positions, axis=0), traj.actions)

    def test_positions_stay_in_range(
        self, coarse_grid: GridTable, trajectories: List[Trajectory]
    ) -> None:
        """Test that moves are clamped to the grid range."""
        for traj in trajectories:
            assert all(coarse_grid.contains(p) for p in traj.positions)

    def test_states_are_nearest_grid_states(
        self, coarse_grid: GridTable, trajectories: List[Trajectory]
    ) -> None:
        """Test that every state is the nearest-grid ground truth of its position."""
        for traj in trajectories:
            for t in range(traj.steps + 1):
                assert traj.state(t) == coarse_grid.nearest_state(traj.positions[t])

    def test_deterministic_per_seed(self, coarse_grid: GridTable) -> None:
        """Test that the seed fixes the trajectories."""
        a = generate_trajectories(coarse_grid, 3, steps=5, seed=9)
        b = generate_trajectories(coarse_grid, 3, steps=5, seed=9)
        c = generate_trajectories(coarse_grid, 3, steps=5, seed=10)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.positions, y.positions)
        assert not np.array_equal(a[0].positions, c[0].positions)

    def test_zero_std_stands_still(self, coarse_grid: GridTable) -> None:
        """Test that a zero action std never moves the peg."""
        traj = generate_trajectories(coarse_grid, 1, steps=3, action_std=(0.0, 0.0), seed=1)[0]
        np.testing.assert_array_equal(traj.actions, np.zeros((3, 2)))

    def test_sparse_grid_starts(self, coarse_grid: GridTable) -> None:
        """Test that starts on a sparse grid are probed points."""
        sparse = subsample_grid(coarse_grid, 0.2, seed=4)
        probed = sparse.probed_positions()
        for traj in generate_trajectories(sparse, 10, steps=2, seed=2):
            assert np.min(np.linalg.norm(probed - traj.start, axis=1)) == 0.0
            assert not np.isnan(traj.states).any()

    def test_default_std(self, coarse_grid: GridTable) -> None:
        """Test that the default std is half the spacing."""
        assert default_action_std(coarse_grid) == (0.5, 0.5)

    @pytest.mark.parametrize(
        "kwargs", [{"steps": 0}, {"count": -1}, {"action_std": (-0.1, 0.1)}]
    )
    def test_bad_arguments(self, coarse_grid: GridTable, kwargs: dict) -> None:
        """Test argument validation."""
        arguments = {"count": 2, "steps": 3}
        arguments.update(kwargs)
        with pytest.raises(ValueError):
            generate_trajectories(coarse_grid, **arguments)

    def test_stack(self, trajectories: List[Trajectory], coarse_grid: GridTable) -> None:
        """Test stacking equal-length trajectories and rejecting mixed ones."""
        states, actions = stack_trajectories(trajectories)
        assert states.shape == (12, 5, 30)
        assert actions.shape == (12, 4, 2)
        longer = generate_trajectories(coarse_grid, 1, steps=6, seed=0)
        with pytest.raises(ValueError):
            stack_trajectories(trajectories + longer)
        with pytest.raises(ValueError):
            stack_trajectories([])

    def test_trajectory_shape_validation(self) -> None:
        """Test that mismatched arrays are rejected."""
        with pytest.raises(ValueError):
            Trajectory(np.zeros((3, 2)), np.zeros((3, 2)), np.zeros((4, 30)))


class TestDatasetFiles:
    """Test the dataset file format."""

    def test_round_trip_is_exact(self, trajectories: List[Trajectory], tmp_path: Path) -> None:
        """Test that save then load reproduces every array bit-exactly."""
        path = tmp_path / "round-15.traj.csv"
        save_dataset(trajectories, path)
        loaded = load_dataset(path)
        assert len(loaded) == len(trajectories)
        for original, copy in zip(trajectories, loaded):
            np.testing.assert_array_equal(original.actions, copy.actions)
            np.testing.assert_array_equal(original.positions, copy.positions)
            np.testing.assert_array_equal(original.states, copy.states)
            assert copy.hole_id == "round-15"

    def test_layout(self, trajectories: List[Trajectory], tmp_path: Path) -> None:
        """Test the header and the empty terminal action fields."""
        path = tmp_path / "data.traj.csv"
        save_dataset(trajectories[:1], path)
        lines = path.read_text().splitlines()
        assert lines[0] == "T=4 dim=30"
        assert len(lines) == 1 + 5
        assert lines[5].split(",")[4:6] == ["", ""]
        assert lines[1].startswith("0,0,")

    def test_explicit_label(self, trajectories: List[Trajectory], tmp_path: Path) -> None:
        """Test that a label overrides the file-name hole id."""
        path = tmp_path / "anything.csv"
        save_dataset(trajectories[:2], path)
        assert {t.hole_id for t in load_dataset(path, hole_id="square-15")} == {"square-15"}

    def test_empty_dataset(self, tmp_path: Path) -> None:
        """Test that an empty list writes a loadable file."""
        path = tmp_path / "empty.traj.csv"
        save_dataset([], path)
        assert load_dataset(path) == []

    def test_truncated_file(self, trajectories: List[Trajectory], tmp_path: Path) -> None:
        """Test that a missing terminal row is reported."""
        path = tmp_path / "cut.traj.csv"
        save_dataset(trajectories[:1], path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(DatasetFormatError, match="truncated"):
            load_dataset(path)

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda lines: ["T=4 dim=31"] + lines[1:],
            lambda lines: ["steps=4"] + lines[1:],
            lambda lines: lines[:1] + [lines[2]] + lines[1:2] + lines[3:],
            lambda lines: lines[:1] + [lines[1].replace(",", ";", 1)] + lines[2:],
        ],
    )
    def test_malformed_files(
        self, trajectories: List[Trajectory], tmp_path: Path, mutate: object
    ) -> None:
        """Test that bad headers, reordered steps and bad fields are rejected."""
        path = tmp_path / "bad.traj.csv"
        save_dataset(trajectories[:1], path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(mutate(lines)) + "\n")  # type: ignore[operator]
        with pytest.raises(DatasetFormatError):
            load_dataset(path)

    def test_mixed_lengths_rejected(
        self, trajectories: List[Trajectory], coarse_grid: GridTable, tmp_path: Path
    ) -> None:
        """Test that a dataset file holds one trajectory length."""
        longer = generate_trajectories(coarse_grid, 1, steps=6, seed=0)
        with pytest.raises(ValueError):
            save_dataset(trajectories + longer, tmp_path / "mixed.traj.csv")
