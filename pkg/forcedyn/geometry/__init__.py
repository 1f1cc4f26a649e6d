"""
Geometry package: hole shapes, signed distances, peg footprints and catalogs.

Examples:
    >>> from forcedyn.geometry import catalog, make_footprint
    >>> specs = catalog("training")
    >>> footprint = make_footprint(specs[0])
"""

from .catalog import (
    BENCHMARK_HOLES,
    CatalogRole,
    catalog,
    dump_catalog,
    find_hole,
    load_catalog,
)
from .footprint import PegFootprint, make_footprint
from .shapes import (
    POINT_SYMMETRIC_KINDS,
    TESTING_KINDS,
    TRAINING_KINDS,
    HoleShape,
    HoleSpec,
    ShapeKind,
    sdf,
    shape_for,
)

__all__ = [
    "ShapeKind",
    "HoleSpec",
    "HoleShape",
    "TRAINING_KINDS",
    "TESTING_KINDS",
    "POINT_SYMMETRIC_KINDS",
    "sdf",
    "shape_for",
    "PegFootprint",
    "make_footprint",
    "CatalogRole",
    "catalog",
    "find_hole",
    "dump_catalog",
    "load_catalog",
    "BENCHMARK_HOLES",
]
