"""
Training and testing hole catalogs.

The training catalog holds seven deformable shapes at three sizes each; the
testing catalog holds rigid holes of unseen size (round, square, triangle at
15 mm) and unseen shapes (ellipse, hexagon, L, X at 15 mm).
"""

from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np

from ..core.constants import (
    DEFAULT_CLEARANCE_MM,
    DEFORMABLE_ELASTICITY,
    RIGID_ELASTICITY,
    TESTING_SIZE_MM,
    TRAINING_SIZES_MM,
)
from ..core.exceptions import HoleSpecError
from .shapes import HoleSpec, ShapeKind

TRAINING_ORDER = (
    ShapeKind.SQUARE,
    ShapeKind.ROUND,
    ShapeKind.SEMICIRCLE,
    ShapeKind.TRIANGLE,
    ShapeKind.DIAMOND,
    ShapeKind.PENTAGON,
    ShapeKind.TRAPEZIUM,
)
TESTING_ORDER = (
    ShapeKind.ROUND,
    ShapeKind.SQUARE,
    ShapeKind.TRIANGLE,
    ShapeKind.ELLIPSE,
    ShapeKind.HEXAGON,
    ShapeKind.L_SHAPE,
    ShapeKind.X_SHAPE,
)
# Holes reported in the controller success table
BENCHMARK_HOLES = ("round-15", "square-15", "triangle-15", "ellipse-15", "hexagon-15", "xshape-15")


class CatalogRole(Enum):
    """Which catalog to build."""

    TRAINING = "training"
    TESTING = "testing"


def catalog(
    role: Union[CatalogRole, str],
    clearance_jitter: float = 0.0,
    seed: int = 0,
) -> List[HoleSpec]:
    """
    Build the hole catalog for a role.

    Args:
        role: ``training`` (21 deformable specs) or ``testing`` (7 rigid specs)
        clearance_jitter: Half-width of a uniform perturbation of the 1 mm clearance
        seed: Seed for the clearance perturbation

    Returns:
        List of HoleSpec in a fixed order

    Raises:
        HoleSpecError: If the role is unknown or the jitter is not smaller than the clearance
    """
    try:
        role = CatalogRole(role) if isinstance(role, str) else role
    except ValueError as exc:
        raise HoleSpecError(f"Unknown catalog role: {role!r}", field="role", value=role) from exc
    if not 0.0 <= clearance_jitter < DEFAULT_CLEARANCE_MM:
        raise HoleSpecError(
            "clearance_jitter must be in [0, clearance)",
            field="clearance_jitter",
            value=clearance_jitter,
        )

    if role is CatalogRole.TRAINING:
        entries = [
            (kind, size, DEFORMABLE_ELASTICITY)
            for kind in TRAINING_ORDER
            for size in TRAINING_SIZES_MM
        ]
    else:
        entries = [(kind, TESTING_SIZE_MM, RIGID_ELASTICITY) for kind in TESTING_ORDER]

    rng: Optional[np.random.Generator] = None
    if clearance_jitter > 0:
        rng = np.random.default_rng(seed)

    specs = []
    for kind, size, elasticity in entries:
        clearance = DEFAULT_CLEARANCE_MM
        if rng is not None:
            clearance += float(rng.uniform(-clearance_jitter, clearance_jitter))
        specs.append(HoleSpec(kind=kind, size=size, elasticity=elasticity, clearance=clearance))
    return specs


def find_hole(hole_id: str, specs: Optional[Iterable[HoleSpec]] = None) -> HoleSpec:
    """
    Look up a spec by ``hole_id`` in the given specs (default: both catalogs).

    Raises:
        HoleSpecError: If no spec has that id
    """
    pool = list(specs) if specs is not None else catalog("training") + catalog("testing")
    for spec in pool:
        if spec.hole_id == hole_id:
            return spec
    raise HoleSpecError(f"Unknown hole id: {hole_id!r}", field="hole_id", value=hole_id)


def dump_catalog(specs: Iterable[HoleSpec], path: Union[str, Path]) -> None:
    """Write specs as ``kind,size_mm,elasticity,clearance_mm`` lines."""
    lines = ["# kind,size_mm,elasticity,clearance_mm"] + [spec.to_line() for spec in specs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_catalog(path: Union[str, Path]) -> List[HoleSpec]:
    """
    Read a catalog file, skipping blank lines and ``#`` comments.

    Raises:
        FileNotFoundError: If the file does not exist
        HoleSpecError: If a line is malformed (message carries the line number)
    """
    specs = []
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            specs.append(HoleSpec.from_line(stripped))
        except HoleSpecError as exc:
            raise HoleSpecError(
                f"{path}:{number}: {exc}", field=exc.field, value=exc.value
            ) from exc
    return specs
