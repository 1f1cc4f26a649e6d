"""
Core package: exceptions, constants, seeding and instrumentation shared by
every other forcedyn subpackage.
"""

from .exceptions import (
    ConfigError,
    DatasetFormatError,
    DivergenceError,
    EmptyFootprintError,
    ForceDynError,
    HoleSpecError,
    ModelFormatError,
    ModelVersionError,
    NonMonotoneFieldError,
    ReportSchemaError,
)
from .seeding import derive_seed, make_rng

__all__ = [
    "ForceDynError",
    "HoleSpecError",
    "EmptyFootprintError",
    "NonMonotoneFieldError",
    "DivergenceError",
    "DatasetFormatError",
    "ModelFormatError",
    "ModelVersionError",
    "ConfigError",
    "ReportSchemaError",
    "derive_seed",
    "make_rng",
]
