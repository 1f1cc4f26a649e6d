"""
Parametric 2-D hole shapes and their signed distance functions.

Every hole is described by a frozen HoleSpec and realized as a HoleShape whose
``sdf`` is negative inside the aperture, positive over plate material and zero
on the boundary. Shapes are centered on their area centroid so that a zero
offset means a centered peg.

Available shapes:
    - DiskShape: round holes (analytic)
    - EllipseShape: elliptical holes (iterative closest point, exact to rounding)
    - SemicircleShape: half-disk (intersection of a disk and a half-plane)
    - PolygonShape: every polygonal kind (exact point-in-polygon + edge distance)

Usage:
    >>> spec = HoleSpec(kind=ShapeKind.ROUND, size=20.0, elasticity=5.0)
    >>> sdf(spec, (0.0, 0.0))
    -10.0
"""

# pylint: disable=too-few-public-methods
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from ..core.constants import (
    DEFAULT_CLEARANCE_MM,
    DEFAULT_FLOOR_DEPTH_MM,
    DEFAULT_PLATE_THICKNESS_MM,
    SDF_GRADIENT_STEP_MM,
)
from ..core.exceptions import HoleSpecError

PointLike = Union[Sequence[float], np.ndarray]


class ShapeKind(Enum):
    """Cross-section kinds of pegs and holes."""

    SQUARE = "square"
    ROUND = "round"
    SEMICIRCLE = "semicircle"
    TRIANGLE = "triangle"
    DIAMOND = "diamond"
    PENTAGON = "pentagon"
    TRAPEZIUM = "trapezium"
    ELLIPSE = "ellipse"
    HEXAGON = "hexagon"
    L_SHAPE = "lshape"
    X_SHAPE = "xshape"

    @classmethod
    def from_name(cls, name: str) -> "ShapeKind":
        """
        Look up a kind by its value or member name, case-insensitively.

        Raises:
            HoleSpecError: If the name matches no kind
        """
        key = name.strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise HoleSpecError(f"Unknown shape kind: {name!r}", field="kind", value=name)


TRAINING_KINDS = frozenset(
    {
        ShapeKind.SQUARE,
        ShapeKind.ROUND,
        ShapeKind.SEMICIRCLE,
        ShapeKind.TRIANGLE,
        ShapeKind.DIAMOND,
        ShapeKind.PENTAGON,
        ShapeKind.TRAPEZIUM,
    }
)
TESTING_KINDS = frozenset(
    {ShapeKind.ELLIPSE, ShapeKind.HEXAGON, ShapeKind.L_SHAPE, ShapeKind.X_SHAPE}
)
POINT_SYMMETRIC_KINDS = frozenset(
    {ShapeKind.ROUND, ShapeKind.SQUARE, ShapeKind.ELLIPSE, ShapeKind.HEXAGON, ShapeKind.X_SHAPE}
)


@dataclass(frozen=True)
class HoleSpec:
    """
    A hole in the plate together with the matching peg.

    Attributes:
        kind: Cross-section shape of hole and peg
        size: Characteristic size in mm (edge length, diameter, or span; see ``shape_for``)
        elasticity: Penalty stiffness k in N/mm per mm^2 of contact area
        clearance: Gap between hole and peg cross-sections in mm
        plate_thickness: Plate thickness in mm
        floor_depth: Depth of the hole floor below the plate top in mm
    """

    kind: ShapeKind
    size: float
    elasticity: float
    clearance: float = DEFAULT_CLEARANCE_MM
    plate_thickness: float = DEFAULT_PLATE_THICKNESS_MM
    floor_depth: float = DEFAULT_FLOOR_DEPTH_MM

    def __post_init__(self) -> None:
        """Validate the specification right after construction."""
        self.validate()

    def validate(self) -> bool:
        """
        Check the ordering and positivity constraints of the specification.

        Returns:
            True if the specification is valid

        Raises:
            HoleSpecError: If any constraint is violated
        """
        if not isinstance(self.kind, ShapeKind):
            raise HoleSpecError("kind must be a ShapeKind", field="kind", value=self.kind)
        for name in ("size", "elasticity", "clearance", "plate_thickness", "floor_depth"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise HoleSpecError(f"{name} must be positive and finite", field=name, value=value)
        if self.floor_depth <= self.plate_thickness:
            raise HoleSpecError(
                "floor_depth must exceed plate_thickness",
                field="floor_depth",
                value=self.floor_depth,
            )
        return True

    @property
    def hole_id(self) -> str:
        """Short identifier such as ``round-15``."""
        return f"{self.kind.value}-{self.size:g}"

    def to_line(self) -> str:
        """Serialize as ``kind,size_mm,elasticity,clearance_mm``."""
        return f"{self.kind.value},{self.size!r},{self.elasticity!r},{self.clearance!r}"

    @classmethod
    def from_line(cls, line: str) -> "HoleSpec":
        """
        Parse a ``kind,size_mm,elasticity,clearance_mm`` catalog line.

        Raises:
            HoleSpecError: If the line is malformed or describes an invalid hole
        """
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise HoleSpecError(f"Expected 4 comma-separated fields, got {len(parts)}: {line!r}")
        try:
            size, elasticity, clearance = (float(p) for p in parts[1:])
        except ValueError as exc:
            raise HoleSpecError(f"Non-numeric catalog field in {line!r}") from exc
        return cls(
            kind=ShapeKind.from_name(parts[0]),
            size=size,
            elasticity=elasticity,
            clearance=clearance,
        )


class HoleShape(ABC):
    """
    Abstract base class for hole apertures.

    All shapes implement ``sdf`` over arrays of points with shape ``(..., 2)``
    in mm and report a conservative ``extent`` (max |coordinate| of the shape).
    """

    @abstractmethod
    def sdf(self, points: np.ndarray) -> np.ndarray:
        """
        Signed distance from points to the aperture boundary.

        Args:
            points: Array of shape (..., 2) in mm

        Returns:
            Array of shape (...) with negative values inside the aperture
        """

    @property
    @abstractmethod
    def extent(self) -> float:
        """Upper bound on |x| and |y| over the aperture."""

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """
        Unit outward gradient of the sdf by central differences.

        Points where the gradient vanishes get a zero vector.
        """
        p = np.asarray(points, dtype=float)
        step = SDF_GRADIENT_STEP_MM
        ex = np.array([step, 0.0])
        ey = np.array([0.0, step])
        gx = (self.sdf(p + ex) - self.sdf(p - ex)) / (2 * step)
        gy = (self.sdf(p + ey) - self.sdf(p - ey)) / (2 * step)
        grad = np.stack([gx, gy], axis=-1)
        norm = np.linalg.norm(grad, axis=-1, keepdims=True)
        return np.divide(grad, norm, out=np.zeros_like(grad), where=norm > 0)


class DiskShape(HoleShape):
    """Round aperture of a given radius."""

    def __init__(self, radius: float) -> None:
        self.radius = radius

    def sdf(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return np.hypot(p[..., 0], p[..., 1]) - self.radius

    @property
    def extent(self) -> float:
        return self.radius


class EllipseShape(HoleShape):
    """
    Elliptical aperture with semi-axes ``a`` (x) and ``b`` (y).

    The distance is found by iterating the closest point on the boundary in the
    first quadrant (the curvature-center update), so the result is the distance
    to an actual boundary point and is symmetric under p -> -p by construction.
    """

    ITERATIONS = 8

    def __init__(self, a: float, b: float) -> None:
        self.a = a
        self.b = b

    def sdf(self, points: np.ndarray) -> np.ndarray:
        p = np.abs(np.asarray(points, dtype=float))
        px, py = p[..., 0], p[..., 1]
        a, b = self.a, self.b
        tx = np.full(px.shape, math.sqrt(0.5))
        ty = np.full(px.shape, math.sqrt(0.5))
        for _ in range(self.ITERATIONS):
            ex = (a * a - b * b) * tx**3 / a
            ey = (b * b - a * a) * ty**3 / b
            rx, ry = a * tx - ex, b * ty - ey
            qx, qy = px - ex, py - ey
            r = np.hypot(rx, ry)
            q = np.maximum(np.hypot(qx, qy), 1e-300)
            tx = np.clip((qx * r / q + ex) / a, 0.0, 1.0)
            ty = np.clip((qy * r / q + ey) / b, 0.0, 1.0)
            t = np.maximum(np.hypot(tx, ty), 1e-300)
            tx, ty = tx / t, ty / t
        dist = np.hypot(px - a * tx, py - b * ty)
        inside = (px / a) ** 2 + (py / b) ** 2 < 1.0
        return np.where(inside, -dist, dist)

    @property
    def extent(self) -> float:
        return max(self.a, self.b)


class SemicircleShape(HoleShape):
    """
    Half-disk aperture with its flat edge at the bottom, centered on its centroid.

    The sdf is ``max(disk, half-plane)``: exact inside, a lower bound on the true
    distance outside near the two corners.
    """

    def __init__(self, radius: float) -> None:
        self.radius = radius
        self.offset = 4.0 * radius / (3.0 * math.pi)

    def sdf(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        disk = np.hypot(p[..., 0], p[..., 1] + self.offset) - self.radius
        flat = -self.offset - p[..., 1]
        return np.maximum(disk, flat)

    @property
    def extent(self) -> float:
        return self.radius + self.offset


class PolygonShape(HoleShape):
    """
    Simple polygon given by its vertex list.

    Containment uses the even-odd crossing rule and the magnitude is the exact
    distance to the nearest edge, so the sdf is a true signed distance.
    """

    def __init__(self, vertices: Sequence[Tuple[float, float]]) -> None:
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 3:
            raise HoleSpecError("A polygon needs at least 3 two-dimensional vertices")

    def sdf(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        q = p.reshape(-1, 2)
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        ba = b - a
        pa = q[:, None, :] - a[None, :, :]
        h = np.clip(np.sum(pa * ba, axis=-1) / np.sum(ba * ba, axis=-1), 0.0, 1.0)
        diff = pa - ba[None, :, :] * h[..., None]
        dist = np.min(np.hypot(diff[..., 0], diff[..., 1]), axis=1)

        qx, qy = q[:, 0:1], q[:, 1:2]
        ay, by = a[None, :, 1], b[None, :, 1]
        straddles = (ay > qy) != (by > qy)
        dy = np.where(straddles, by - ay, 1.0)
        x_cross = a[None, :, 0] + (b[None, :, 0] - a[None, :, 0]) * (qy - ay) / dy
        crossings = np.count_nonzero(straddles & (qx < x_cross), axis=1)
        inside = crossings % 2 == 1
        return np.where(inside, -dist, dist).reshape(p.shape[:-1])

    @property
    def extent(self) -> float:
        return float(np.max(np.abs(self.vertices)))


def _point_symmetric(half: Sequence[Tuple[float, float]]) -> list[Tuple[float, float]]:
    """Close a half vertex list by point reflection so that v[k + n/2] == -v[k] exactly."""
    return list(half) + [(-x, -y) for x, y in half]


def _centered(vertices: Sequence[Tuple[float, float]]) -> list[Tuple[float, float]]:
    """Translate a polygon so its area centroid is the origin (shoelace formula)."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return [(float(px - cx), float(py - cy)) for px, py in v]


def _regular(count: int, circumradius: float, start_deg: float) -> list[Tuple[float, float]]:
    step = 360.0 / count
    return [
        (
            circumradius * math.cos(math.radians(start_deg + k * step)),
            circumradius * math.sin(math.radians(start_deg + k * step)),
        )
        for k in range(count)
    ]


@lru_cache(maxsize=64)
def shape_for(spec: HoleSpec) -> HoleShape:
    """
    Build the aperture geometry for a hole specification.

    Size conventions:
        - round, semicircle: diameter
        - ellipse: major axis (x); the minor axis is 2/3 of it
        - square, triangle, diamond, pentagon, hexagon: edge length
        - trapezium: bottom edge; top edge is half of it, height is size*sqrt(3)/2
        - lshape: outer edge of the bounding square, arms half as wide
        - xshape: tip-to-tip span of a cross with arms a third as wide, rotated 45 degrees

    Args:
        spec: Hole specification

    Returns:
        HoleShape centered on its area centroid
    """
    s = spec.size
    kind = spec.kind
    if kind is ShapeKind.ROUND:
        return DiskShape(s / 2.0)
    if kind is ShapeKind.ELLIPSE:
        return EllipseShape(s / 2.0, s / 3.0)
    if kind is ShapeKind.SEMICIRCLE:
        return SemicircleShape(s / 2.0)
    if kind is ShapeKind.SQUARE:
        h = s / 2.0
        return PolygonShape(_point_symmetric([(h, h), (-h, h)]))
    if kind is ShapeKind.DIAMOND:
        d = s / math.sqrt(2.0)
        return PolygonShape(_point_symmetric([(d, 0.0), (0.0, d)]))
    if kind is ShapeKind.TRIANGLE:
        return PolygonShape(_regular(3, s / math.sqrt(3.0), 90.0))
    if kind is ShapeKind.PENTAGON:
        return PolygonShape(_regular(5, s / (2.0 * math.sin(math.pi / 5.0)), 90.0))
    if kind is ShapeKind.HEXAGON:
        return PolygonShape(_point_symmetric(_regular(6, s, 0.0)[:3]))
    if kind is ShapeKind.TRAPEZIUM:
        bottom, top, height = s, s / 2.0, s * math.sqrt(3.0) / 2.0
        yc = height * (bottom + 2.0 * top) / (3.0 * (bottom + top))
        return PolygonShape(
            [
                (-bottom / 2.0, -yc),
                (bottom / 2.0, -yc),
                (top / 2.0, height - yc),
                (-top / 2.0, height - yc),
            ]
        )
    if kind is ShapeKind.L_SHAPE:
        w = s / 2.0
        return PolygonShape(_centered([(0, 0), (s, 0), (s, w), (w, w), (w, s), (0, s)]))
    if kind is ShapeKind.X_SHAPE:
        t, w = s / 2.0, s / 6.0
        plus = [(t, -w), (t, w), (w, w), (w, t), (-w, t), (-w, w)]
        c = math.sqrt(0.5)
        return PolygonShape(_point_symmetric([(c * (x - y), c * (x + y)) for x, y in plus]))
    raise HoleSpecError(f"No geometry for shape kind {kind}", field="kind", value=kind)


def sdf(spec: HoleSpec, p: PointLike) -> float:
    """
    Signed distance (mm) from a single point to the hole boundary.

    Args:
        spec: Hole specification
        p: Point (x, y) in mm relative to the hole centroid

    Returns:
        Negative inside the aperture, positive over plate material, zero on the boundary
    """
    return float(shape_for(spec).sdf(np.asarray(p, dtype=float)))
