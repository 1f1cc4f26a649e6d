"""
Force-torque readings and the 30-d multi-pose force state.

A ForceState concatenates five 6-d readings taken at the same lateral offset
under five end-effector tilts. Forces of all poses come first (dims 0-14),
torques second (dims 15-29); within each half, poses follow POSE_ORDER and
channels follow x, y, z.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from ..core.constants import FORCE_DIMS, POSE_COUNT, STATE_DIM, TILT_DELTA_DEG
from ..core.exceptions import DatasetFormatError

_TILT_ANGLES = (
    (0.0, 0.0),
    (TILT_DELTA_DEG, 0.0),
    (-TILT_DELTA_DEG, 0.0),
    (0.0, TILT_DELTA_DEG),
    (0.0, -TILT_DELTA_DEG),
)


@dataclass(frozen=True)
class ForceTorque:
    """
    One 6-d sensor reading.

    Attributes:
        fx, fy, fz: Force in N
        tx, ty, tz: Torque in N*m
    """

    fx: float
    fy: float
    fz: float
    tx: float
    ty: float
    tz: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"ForceTorque components must be finite: {self.as_tuple()}")

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        """Return (fx, fy, fz, tx, ty, tz)."""
        return (self.fx, self.fy, self.fz, self.tx, self.ty, self.tz)

    @property
    def force(self) -> np.ndarray:
        """Force vector in N."""
        return np.array([self.fx, self.fy, self.fz])

    @property
    def torque(self) -> np.ndarray:
        """Torque vector in N*m."""
        return np.array([self.tx, self.ty, self.tz])

    @classmethod
    def zero(cls) -> "ForceTorque":
        """A reading with every component zero."""
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Tilt:
    """
    End-effector rotation about the x- and y-axis in degrees.
    """

    rx: float
    ry: float

    def __post_init__(self) -> None:
        if (self.rx, self.ry) not in _TILT_ANGLES:
            raise ValueError(f"Unsupported tilt ({self.rx}, {self.ry})")

    @property
    def is_upright(self) -> bool:
        """True for the zero-rotation pose."""
        return self.rx == 0.0 and self.ry == 0.0


POSE_ORDER: Tuple[Tilt, ...] = tuple(Tilt(rx, ry) for rx, ry in _TILT_ANGLES)


class ForceState:
    """
    The 30-d multi-pose force state.

    Wraps a read-only float64 array. Equality is exact elementwise equality.
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[float]) -> None:
        if not isinstance(values, np.ndarray):
            values = list(values)
        array = np.array(values, dtype=float).reshape(-1)
        if array.shape != (STATE_DIM,):
            raise ValueError(f"ForceState needs {STATE_DIM} values, got {array.shape[0]}")
        array.setflags(write=False)
        self._values = array

    @property
    def values(self) -> np.ndarray:
        """The 30 values as a read-only array."""
        return self._values

    def force_part(self) -> np.ndarray:
        """Dims 0-14: (fx, fy, fz) for each pose."""
        return self._values[:FORCE_DIMS]

    def torque_part(self) -> np.ndarray:
        """Dims 15-29: (tx, ty, tz) for each pose."""
        return self._values[FORCE_DIMS:]

    def reading(self, pose_index: int) -> ForceTorque:
        """The 6-d reading of one pose in POSE_ORDER."""
        f = self._values[3 * pose_index : 3 * pose_index + 3]
        t = self._values[FORCE_DIMS + 3 * pose_index : FORCE_DIMS + 3 * pose_index + 3]
        return ForceTorque(*(float(v) for v in np.concatenate([f, t])))

    @classmethod
    def from_readings(cls, readings: Sequence[ForceTorque]) -> "ForceState":
        """
        Pack five readings (in POSE_ORDER) into the force-then-torque layout.
        """
        if len(readings) != POSE_COUNT:
            raise ValueError(f"Expected {POSE_COUNT} readings, got {len(readings)}")
        forces = [c for r in readings for c in (r.fx, r.fy, r.fz)]
        torques = [c for r in readings for c in (r.tx, r.ty, r.tz)]
        return cls(forces + torques)

    def to_line(self) -> str:
        """Serialize as 30 comma-separated decimal values (round-trip exact)."""
        return ",".join(repr(float(v)) for v in self._values)

    @classmethod
    def from_line(cls, line: str) -> "ForceState":
        """
        Parse 30 comma-separated decimal values.

        Raises:
            DatasetFormatError: If the line does not hold exactly 30 numbers
        """
        parts = line.strip().split(",")
        if len(parts) != STATE_DIM:
            raise DatasetFormatError(f"Expected {STATE_DIM} values, got {len(parts)}")
        try:
            return cls(float(p) for p in parts)
        except ValueError as exc:
            raise DatasetFormatError(f"Non-numeric force state value in {line!r}") from exc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ForceState):
            return NotImplemented
        return bool(np.array_equal(self._values, other._values))

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"ForceState(force={self.force_part().round(3).tolist()}, ...)"
