"""
Peg cross-section sampling.

The peg is the hole shape eroded by the clearance, sampled on a regular
lattice centered on the origin. Each lattice point stands for ``point_area``
mm^2 of peg bottom face in the penalty contact model.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..core.constants import DEFAULT_FOOTPRINT_RESOLUTION, MIN_FOOTPRINT_POINTS
from ..core.exceptions import EmptyFootprintError, HoleSpecError
from .shapes import HoleSpec, shape_for

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PegFootprint:
    """
    Lattice samples of the peg bottom face.

    Attributes:
        points: Array of shape (N, 2), mm, in the hole frame for a centered peg
        point_area: Area represented by each point in mm^2
    """

    points: np.ndarray
    point_area: float

    @property
    def count(self) -> int:
        """Number of sample points."""
        return int(self.points.shape[0])

    @property
    def centroid(self) -> np.ndarray:
        """Mean of the sample points; the TCP and tilt pivot."""
        return np.asarray(self.points.mean(axis=0))

    @property
    def area(self) -> float:
        """Total represented area in mm^2."""
        return self.count * self.point_area


@lru_cache(maxsize=64)
def make_footprint(
    spec: HoleSpec, resolution: float = DEFAULT_FOOTPRINT_RESOLUTION
) -> PegFootprint:
    """
    Sample the peg cross-section for a hole.

    Lattice points ``k / resolution`` (integer k) are kept when their signed
    distance to the hole boundary is strictly below ``-clearance``.

    Args:
        spec: Hole specification
        resolution: Lattice points per mm

    Returns:
        Deterministic PegFootprint with read-only point array

    Raises:
        HoleSpecError: If resolution is not positive
        EmptyFootprintError: If the clearance erodes the whole shape
    """
    if not resolution > 0:
        raise HoleSpecError("resolution must be positive", field="resolution", value=resolution)

    shape = shape_for(spec)
    k_max = int(math.ceil(shape.extent * resolution)) + 1
    axis = np.arange(-k_max, k_max + 1, dtype=float) / resolution
    xx, yy = np.meshgrid(axis, axis, indexing="xy")
    lattice = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    keep = shape.sdf(lattice) < -spec.clearance
    points = lattice[keep]

    if points.shape[0] == 0:
        raise EmptyFootprintError(
            f"Clearance {spec.clearance} mm leaves no peg for {spec.hole_id}", spec=spec
        )
    if points.shape[0] < MIN_FOOTPRINT_POINTS:
        logger.warning(
            "Footprint of %s has only %d points at resolution %.2f",
            spec.hole_id,
            points.shape[0],
            resolution,
        )

    points.setflags(write=False)
    return PegFootprint(points=points, point_area=1.0 / (resolution * resolution))
