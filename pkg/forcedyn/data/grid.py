"""
Grid sampling of multi-pose force states.

A hole is probed on an ``n x n`` lattice of lateral offsets spanning the grid
range. The probed table is the ground truth for offline trajectory synthesis:
any position maps to the state of its nearest probed lattice point.

Lattice index ``row * n + col`` holds position ``(xs[col], ys[row])`` where
``xs`` and ``ys`` run from ``-R/2`` to ``+R/2``. Sparse grids (``fraction < 1``)
probe a random subset of the lattice; unprobed points are masked out and
never returned by lookups.

Usage:
    >>> grid = sample_grid(spec, n=9, grid_range=(4.0, 4.0))
    >>> grid.nearest_state((0.3, -1.1))
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.constants import (
    DEFAULT_F_MAX_N,
    DEFAULT_FOOTPRINT_RESOLUTION,
    DEFAULT_GRID_N,
    DEFAULT_GRID_RANGE_MM,
    STATE_DIM,
)
from ..core.exceptions import DatasetFormatError
from ..core.instrumentation import log_operation
from ..geometry.shapes import HoleSpec
from ..sim.contact import ContactSimulator, SensorNoise
from ..sim.state import ForceState

logger = logging.getLogger(__name__)

PointLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class GridTable:
    """
    Probed force states on a regular lattice.

    Attributes:
        hole_id: Identifier of the probed hole
        n: Lattice side count
        grid_range: (R_x, R_y) extent of the lattice in mm
        f_max: Descent stop threshold used for probing
        positions: (n*n, 2) lattice offsets in mm, row-major
        states: (n*n, 30) states; rows of unprobed points are NaN
        mask: (n*n,) True where the point was probed
    """

    hole_id: str
    n: int
    grid_range: Tuple[float, float]
    f_max: float
    positions: np.ndarray
    states: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        size = self.n * self.n
        if self.positions.shape != (size, 2):
            raise ValueError(f"positions must have shape ({size}, 2)")
        if self.states.shape != (size, STATE_DIM):
            raise ValueError(f"states must have shape ({size}, {STATE_DIM})")
        if self.mask.shape != (size,) or not self.mask.any():
            raise ValueError("mask must select at least one of the lattice points")
        for array in (self.positions, self.states, self.mask):
            array.setflags(write=False)

    @property
    def spacing(self) -> Tuple[float, float]:
        """Lattice spacing (s_x, s_y) in mm."""
        return (self.grid_range[0] / (self.n - 1), self.grid_range[1] / (self.n - 1))

    @property
    def probed_indices(self) -> np.ndarray:
        """Lattice indices of probed points in ascending order."""
        return np.flatnonzero(self.mask)

    @property
    def probe_total(self) -> int:
        """Number of probed points."""
        return int(self.mask.sum())

    @property
    def is_sparse(self) -> bool:
        """True if some lattice points were not probed."""
        return not bool(self.mask.all())

    def position(self, index: int) -> np.ndarray:
        """Lattice offset of an index."""
        return self.positions[index]

    def state(self, index: int) -> ForceState:
        """
        State of a probed lattice point.

        Raises:
            KeyError: If the point was not probed
        """
        if not self.mask[index]:
            raise KeyError(f"Lattice point {index} was not probed")
        return ForceState(self.states[index])

    def clamp(self, points: PointLike) -> np.ndarray:
        """Clamp one or more positions to the grid range."""
        half = np.asarray(self.grid_range, dtype=float) / 2.0
        return np.clip(np.asarray(points, dtype=float), -half, half)

    def contains(self, point: PointLike) -> bool:
        """True if a position lies within the grid range."""
        half = np.asarray(self.grid_range, dtype=float) / 2.0
        return bool(np.all(np.abs(np.asarray(point, dtype=float)) <= half))

    def nearest_indices(self, points: PointLike) -> np.ndarray:
        """
        Nearest probed lattice index for each of ``(..., 2)`` positions.

        Ties go to the smallest lattice index.
        """
        query = np.asarray(points, dtype=float)
        candidates = self.probed_indices
        diff = query[..., None, :] - self.positions[candidates]
        dist2 = np.sum(diff * diff, axis=-1)
        return candidates[np.argmin(dist2, axis=-1)]

    def nearest_index(self, point: PointLike) -> int:
        """Nearest probed lattice index of one position."""
        return int(self.nearest_indices(np.asarray(point, dtype=float).reshape(2)))

    def nearest_state(self, point: PointLike) -> ForceState:
        """State of the nearest probed lattice point."""
        return ForceState(self.states[self.nearest_index(point)])

    def probed_states(self) -> np.ndarray:
        """(M, 30) states of the probed points in index order."""
        return self.states[self.mask]

    def probed_positions(self) -> np.ndarray:
        """(M, 2) positions of the probed points in index order."""
        return self.positions[self.mask]


def lattice(n: int, grid_range: Tuple[float, float]) -> np.ndarray:
    """Row-major ``(n*n, 2)`` lattice over ``[-R/2, R/2]^2``."""
    xs = np.linspace(-grid_range[0] / 2.0, grid_range[0] / 2.0, n)
    ys = np.linspace(-grid_range[1] / 2.0, grid_range[1] / 2.0, n)
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def nearest_grid_state(grid: GridTable, p: PointLike) -> ForceState:
    """
    Ground-truth state at a position: the state of its nearest probed point.

    Args:
        grid: Probed grid
        p: Position in mm, within the grid range

    Returns:
        ForceState of the Euclidean nearest probed lattice point, ties broken
        by smallest (row, col)
    """
    return grid.nearest_state(p)


def fraction_mask(size: int, fraction: float, seed: int) -> np.ndarray:
    """
    Mask selecting ``max(1, round(fraction * size))`` lattice points without
    replacement; all points when ``fraction`` is 1.
    """
    if fraction >= 1.0:
        return np.ones(size, dtype=bool)
    keep = max(1, int(round(fraction * size)))
    chosen = np.random.default_rng(seed).choice(size, size=keep, replace=False)
    mask = np.zeros(size, dtype=bool)
    mask[chosen] = True
    return mask


@log_operation(threshold_s=30.0)
def sample_grid(
    spec: HoleSpec,
    n: int = DEFAULT_GRID_N,
    grid_range: Tuple[float, float] = (DEFAULT_GRID_RANGE_MM, DEFAULT_GRID_RANGE_MM),
    f_max: float = DEFAULT_F_MAX_N,
    fraction: float = 1.0,
    seed: int = 0,
    simulator: Optional[ContactSimulator] = None,
    resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
) -> GridTable:
    """
    Probe a hole on an ``n x n`` lattice with zero sensor noise.

    Args:
        spec: Hole to probe
        n: Lattice side count (>= 2)
        grid_range: (R_x, R_y) in mm
        f_max: Descent stop threshold in N
        fraction: Share of lattice points to probe, in (0, 1]
        seed: Selects the probed subset when ``fraction < 1``
        simulator: Simulator to probe with (counts probes); a noise-free one
            is built from the other arguments if omitted

    Returns:
        GridTable, deterministic given the arguments

    Raises:
        ValueError: If n < 2, the range is not positive or fraction is out of range
    """
    if n < 2:
        raise ValueError(f"Grid side count must be at least 2, got {n}")
    if min(grid_range) <= 0:
        raise ValueError(f"Grid range must be positive, got {grid_range}")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")

    if simulator is None:
        simulator = ContactSimulator(
            spec, f_max=f_max, noise=SensorNoise.off(), resolution=resolution
        )
    size = n * n
    mask = fraction_mask(size, fraction, seed)
    positions = lattice(n, grid_range)
    states = np.full((size, STATE_DIM), np.nan)
    for index in np.flatnonzero(mask):
        states[index] = simulator.probe(positions[index]).state.values

    logger.info("Sampled %s: %d of %d lattice points", spec.hole_id, int(mask.sum()), size)
    return GridTable(
        hole_id=spec.hole_id,
        n=n,
        grid_range=(float(grid_range[0]), float(grid_range[1])),
        f_max=simulator.f_max,
        positions=positions,
        states=states,
        mask=mask,
    )


def save_grid(grid: GridTable, path: Union[str, Path]) -> None:
    """
    Write the probed points of a grid.

    Format: a header ``n=<int> range=<rx>,<ry> f_max=<N> hole=<id>`` followed
    by one ``row,col,px,py,f0..f29`` line per probed point.
    """
    lines: List[str] = [
        f"n={grid.n} range={grid.grid_range[0]!r},{grid.grid_range[1]!r} "
        f"f_max={grid.f_max!r} hole={grid.hole_id}"
    ]
    for index in grid.probed_indices:
        row, col = divmod(int(index), grid.n)
        px, py = (float(v) for v in grid.positions[index])
        lines.append(f"{row},{col},{px!r},{py!r}," + grid.state(int(index)).to_line())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(header: str, path: str) -> Tuple[int, Tuple[float, float], float, str]:
    try:
        fields = dict(item.split("=", 1) for item in header.split())
        n = int(fields["n"])
        rx, ry = (float(v) for v in fields["range"].split(","))
        return n, (rx, ry), float(fields["f_max"]), fields["hole"]
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"Malformed grid header {header!r}", path, 1) from exc


def load_grid(path: Union[str, Path]) -> GridTable:
    """
    Read a grid written by ``save_grid``.

    Raises:
        FileNotFoundError: If the file does not exist
        DatasetFormatError: If the header or a row is malformed
    """
    source = str(path)
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DatasetFormatError("Empty grid file", source, 1)
    n, grid_range, f_max, hole_id = _parse_header(lines[0], source)

    positions = lattice(n, grid_range)
    states = np.full((n * n, STATE_DIM), np.nan)
    mask = np.zeros(n * n, dtype=bool)
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4 + STATE_DIM:
            raise DatasetFormatError(
                f"Expected {4 + STATE_DIM} fields, got {len(parts)}", source, number
            )
        try:
            row, col = int(parts[0]), int(parts[1])
            values = [float(v) for v in parts[4:]]
        except ValueError as exc:
            raise DatasetFormatError("Non-numeric grid value", source, number) from exc
        if not (0 <= row < n and 0 <= col < n):
            raise DatasetFormatError(f"Lattice index ({row}, {col}) out of range", source, number)
        states[row * n + col] = values
        mask[row * n + col] = True

    if not mask.any():
        raise DatasetFormatError("Grid file holds no probed points", source)
    return GridTable(
        hole_id=hole_id,
        n=n,
        grid_range=grid_range,
        f_max=f_max,
        positions=positions,
        states=states,
        mask=mask,
    )


def subsample_grid(grid: GridTable, fraction: float, seed: int = 0) -> GridTable:
    """
    Keep a subset of a fully probed grid without probing again.

    The subset equals the one ``sample_grid`` probes for the same
    ``fraction`` and ``seed``.

    Raises:
        ValueError: If the grid is already sparse or fraction is out of range
    """
    if grid.is_sparse:
        raise ValueError(f"Grid {grid.hole_id} is already sparse")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    mask = fraction_mask(grid.n * grid.n, fraction, seed)
    states = np.where(mask[:, None], grid.states, np.nan)
    return GridTable(
        hole_id=grid.hole_id,
        n=grid.n,
        grid_range=grid.grid_range,
        f_max=grid.f_max,
        positions=grid.positions.copy(),
        states=states,
        mask=mask,
    )
