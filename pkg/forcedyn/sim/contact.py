"""
Synthetic contact simulator standing in for the robot and the wrist sensor.

The peg bottom face is a lattice of footprint points. Points that sit over
plate material (positive hole sdf at their world position) are penalty
springs: once the peg has descended past the plate top plane, each such point
pushes back with ``k * point_area * penetration``. Points within the edge band
of the rim also receive a friction-limited lateral push along the outward sdf
gradient. A tilted peg pivots about the footprint centroid (the TCP), which
turns the flat bottom into a linear height field.

A probe descends until the normal force reaches ``f_max`` (solved by
bisection). If the plate never stops the peg, the peg is inserted and the
sensor reads the hole floor: ``(0, 0, f_max, 0, 0, 0)``.

Usage:
    >>> sim = ContactSimulator(spec)
    >>> reading = sim.probe((2.0, 0.0), rng=np.random.default_rng(0))
    >>> reading.state.force_part()
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..core.constants import (
    DEFAULT_F_MAX_N,
    DEFAULT_FOOTPRINT_RESOLUTION,
    DEFAULT_FORCE_NOISE_N,
    DEFAULT_TORQUE_NOISE_NM,
    DEGREES_TO_RADIANS,
    DESCENT_TOLERANCE_MM,
    EDGE_BAND_MM,
    FORCE_DIMS,
    FRICTION_COEFFICIENT,
    MM_TO_M,
    POSE_COUNT,
)
from ..core.exceptions import NonMonotoneFieldError
from ..geometry.footprint import make_footprint
from ..geometry.shapes import HoleSpec, shape_for
from .state import POSE_ORDER, ForceState, ForceTorque, Tilt

logger = logging.getLogger(__name__)

Offset = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class SensorNoise:
    """
    Per-channel standard deviation of zero-mean Gaussian sensor noise.

    Attributes:
        force: Std of every force channel in N
        torque: Std of every torque channel in N*m
    """

    force: float = DEFAULT_FORCE_NOISE_N
    torque: float = DEFAULT_TORQUE_NOISE_NM

    def __post_init__(self) -> None:
        if self.force < 0 or self.torque < 0:
            raise ValueError(f"Noise stds must be non-negative, got {self.force}, {self.torque}")

    @classmethod
    def off(cls) -> "SensorNoise":
        """Noise-free sensor, used for ground-truth grids."""
        return cls(force=0.0, torque=0.0)

    @property
    def enabled(self) -> bool:
        """True if any channel is noisy."""
        return self.force > 0 or self.torque > 0

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one 30-d noise vector in the ForceState layout."""
        scale = np.concatenate(
            [np.full(FORCE_DIMS, self.force), np.full(FORCE_DIMS, self.torque)]
        )
        return rng.normal(0.0, 1.0, size=scale.shape) * scale


@dataclass(frozen=True)
class ProbeResult:
    """
    Outcome of one descend-until-threshold probe.

    Attributes:
        reading: Wrench measured at the stopping depth
        descent_depth: TCP descent in mm below the first-contact height
        inserted: True when the plate did not stop the peg
    """

    reading: ForceTorque
    descent_depth: float
    inserted: bool


@dataclass(frozen=True)
class MultiPoseReading:
    """
    A full five-pose probe: the packed state plus the per-pose results.
    """

    state: ForceState
    results: Tuple[ProbeResult, ...]

    @property
    def all_inserted(self) -> bool:
        """True when every pose inserted."""
        return all(result.inserted for result in self.results)


def inserted_signature(f_max: float) -> ForceState:
    """The state of a peg resting on the hole floor in all five poses."""
    reading = ForceTorque(0.0, 0.0, f_max, 0.0, 0.0, 0.0)
    return ForceState.from_readings([reading] * POSE_COUNT)


class ContactField:
    """
    Contact geometry of one hole at one lateral offset.

    Everything that does not depend on tilt or depth (which footprint points
    rest on the plate, their lever arms, rim directions) is computed once.
    """

    def __init__(
        self,
        spec: HoleSpec,
        offset: Offset,
        resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
    ) -> None:
        self.spec = spec
        self.offset = np.asarray(offset, dtype=float).reshape(2)
        footprint = make_footprint(spec, resolution)
        shape = shape_for(spec)

        self.centroid = footprint.centroid
        self.lever = footprint.points - self.centroid
        world = footprint.points + self.offset
        distance = shape.sdf(world)
        self.contact = distance > 0.0

        self.stiffness = spec.elasticity * footprint.point_area
        self.contact_lever = self.lever[self.contact]
        band = (distance > 0.0) & (distance < EDGE_BAND_MM)
        rim = np.zeros_like(world)
        if np.any(band):
            rim[band] = shape.gradient(world[band])
        self.rim_direction = rim[self.contact]

    @property
    def contact_count(self) -> int:
        """Number of footprint points over plate material."""
        return int(np.count_nonzero(self.contact))

    def relative_heights(self, tilt: Tilt) -> np.ndarray:
        """
        Height of each contact point above the lowest footprint point under a tilt.

        Values are <= 0; a point at relative height ``-h`` starts penetrating
        once the descent exceeds ``h``.
        """
        tan_x = math.tan(tilt.rx * DEGREES_TO_RADIANS)
        tan_y = math.tan(tilt.ry * DEGREES_TO_RADIANS)
        heights = tan_y * self.lever[:, 0] - tan_x * self.lever[:, 1]
        return heights[self.contact] - heights.max()

    def normal_forces(self, tilt: Tilt, depth: float) -> np.ndarray:
        """Per-contact-point normal force in N at a descent depth."""
        penetration = np.maximum(0.0, depth + self.relative_heights(tilt))
        return self.stiffness * penetration

    def total_fz(self, tilt: Tilt, depth: float) -> float:
        """Total normal force in N."""
        return float(self.normal_forces(tilt, depth).sum())

    def wrench(self, tilt: Tilt, depth: float) -> ForceTorque:
        """
        Total force and torque about the TCP at a descent depth.

        Torques are reported in N*m (lever arms converted from mm).
        """
        fz = self.normal_forces(tilt, depth)
        lateral = FRICTION_COEFFICIENT * fz[:, None] * self.rim_direction
        lever = self.contact_lever * MM_TO_M
        tx = float(np.sum(lever[:, 1] * fz))
        ty = float(-np.sum(lever[:, 0] * fz))
        tz = float(np.sum(lever[:, 0] * lateral[:, 1] - lever[:, 1] * lateral[:, 0]))
        return ForceTorque(
            fx=float(lateral[:, 0].sum()),
            fy=float(lateral[:, 1].sum()),
            fz=float(fz.sum()),
            tx=tx,
            ty=ty,
            tz=tz,
        )

    def solve(self, tilt: Tilt, f_max: float) -> ProbeResult:
        """
        Descend until the normal force reaches ``f_max``.

        Args:
            tilt: End-effector pose
            f_max: Stop threshold in N

        Returns:
            ProbeResult at the solved depth, or the inserted signature

        Raises:
            ValueError: If f_max is not positive
            NonMonotoneFieldError: If fz decreases with depth
        """
        if not f_max > 0:
            raise ValueError(f"f_max must be positive, got {f_max}")

        lo, hi = 0.0, self.spec.plate_thickness
        f_lo, f_hi = self.total_fz(tilt, lo), self.total_fz(tilt, hi)
        if f_hi < f_lo:
            raise NonMonotoneFieldError("Normal force decreased with depth", hi, f_hi)
        if f_hi < f_max:
            return ProbeResult(
                reading=ForceTorque(0.0, 0.0, f_max, 0.0, 0.0, 0.0),
                descent_depth=self.spec.floor_depth,
                inserted=True,
            )

        while hi - lo > DESCENT_TOLERANCE_MM:
            mid = 0.5 * (lo + hi)
            f_mid = self.total_fz(tilt, mid)
            if f_mid < f_lo or f_mid > f_hi:
                raise NonMonotoneFieldError("Normal force decreased with depth", mid, f_mid)
            if f_mid < f_max:
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid

        depth = 0.5 * (lo + hi)
        return ProbeResult(reading=self.wrench(tilt, depth), descent_depth=depth, inserted=False)


def contact_wrench(
    spec: HoleSpec,
    offset: Offset,
    tilt: Tilt,
    depth: float,
    resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
) -> ForceTorque:
    """
    Wrench on the peg at a given offset, tilt and descent depth.

    Raises:
        ValueError: If depth is negative
    """
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    return ContactField(spec, offset, resolution).wrench(tilt, depth)


def solve_descent(
    spec: HoleSpec,
    offset: Offset,
    tilt: Tilt,
    f_max: float,
    resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
) -> ProbeResult:
    """Run one descend-until-threshold probe; see ``ContactField.solve``."""
    return ContactField(spec, offset, resolution).solve(tilt, f_max)


class ContactSimulator:
    """
    Stand-in for the robot, plate and wrist sensor for one hole.

    Every multi-pose probe increments ``probe_count``, which is how callers
    verify that offline training never touches the environment.
    """

    def __init__(
        self,
        spec: HoleSpec,
        f_max: float = DEFAULT_F_MAX_N,
        noise: Optional[SensorNoise] = None,
        resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
    ) -> None:
        """
        Initialize the simulator.

        Args:
            spec: Hole to simulate
            f_max: Descent stop threshold in N
            noise: Sensor noise applied by ``probe`` when an rng is given
            resolution: Footprint lattice points per mm
        """
        if not f_max > 0:
            raise ValueError(f"f_max must be positive, got {f_max}")
        self.spec = spec
        self.f_max = f_max
        self.noise = noise if noise is not None else SensorNoise()
        self.resolution = resolution
        self.probe_count = 0

    def probe(self, offset: Offset, rng: Optional[np.random.Generator] = None) -> MultiPoseReading:
        """
        Probe one lateral offset in all five poses.

        Args:
            offset: Peg offset from the hole centroid in mm
            rng: Noise source; without one the reading is noise-free

        Returns:
            MultiPoseReading with the packed (possibly noisy) state
        """
        self.probe_count += 1
        field = ContactField(self.spec, offset, self.resolution)
        results = tuple(field.solve(tilt, self.f_max) for tilt in POSE_ORDER)
        values = ForceState.from_readings([r.reading for r in results]).values
        if rng is not None and self.noise.enabled:
            values = values + self.noise.sample(rng)
        logger.debug(
            "Probe %s at (%.3f, %.3f): inserted=%s",
            self.spec.hole_id,
            field.offset[0],
            field.offset[1],
            [r.inserted for r in results],
        )
        return MultiPoseReading(state=ForceState(values), results=results)

    def goal_state(self) -> ForceState:
        """Noise-free state at the centered (inserted) position."""
        return goal_state(self.spec, self.f_max)

    def reset_counter(self) -> None:
        """Zero the probe counter."""
        self.probe_count = 0


def probe_multipose(
    spec: HoleSpec,
    offset: Offset,
    f_max: float = DEFAULT_F_MAX_N,
    noise_std: Optional[SensorNoise] = None,
    rng_seed: int = 0,
    resolution: float = DEFAULT_FOOTPRINT_RESOLUTION,
) -> ForceState:
    """
    Five-pose probe packed as a ForceState.

    Args:
        spec: Hole specification
        offset: Peg offset from the hole centroid in mm
        f_max: Descent stop threshold in N
        noise_std: Sensor noise; None means noise-free
        rng_seed: Seed of the noise draw

    Returns:
        ForceState, deterministic given the arguments
    """
    noise = noise_std if noise_std is not None else SensorNoise.off()
    simulator = ContactSimulator(spec, f_max=f_max, noise=noise, resolution=resolution)
    return simulator.probe(offset, np.random.default_rng(rng_seed)).state


def goal_state(spec: HoleSpec, f_max: float = DEFAULT_F_MAX_N) -> ForceState:
    """The noise-free state at offset (0, 0), i.e. the inserted signature."""
    return probe_multipose(spec, (0.0, 0.0), f_max, SensorNoise.off(), rng_seed=0)
