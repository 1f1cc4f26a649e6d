"""
Exception classes for forcedyn operations.

This module defines all custom exceptions used throughout the package. Every
exception derives from ForceDynError so callers can catch anything the package
raises deliberately with a single except clause.
"""

from typing import Any, Optional


class ForceDynError(Exception):
    """
    Base exception class for all forcedyn operations.

    All other forcedyn exceptions inherit from this class, making it easy
    to catch any package-related error.
    """


class HoleSpecError(ForceDynError):
    """
    Raised when a hole specification is invalid.

    This exception is raised when:
    - size, clearance, elasticity or plate thickness are not positive
    - floor depth does not exceed plate thickness
    - a catalog line names an unknown shape kind or has missing fields
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
    ) -> None:
        """
        Initialize HoleSpecError.

        Args:
            message: Description of the validation error
            field: Name of the field that failed validation
            value: The invalid value
        """
        super().__init__(message)
        self.field = field
        self.value = value


class EmptyFootprintError(ForceDynError):
    """
    Raised when eroding a hole shape by its clearance leaves no peg.

    This happens when the clearance is at least the inradius of the shape,
    e.g. a round hole of diameter 2 mm with a 1 mm clearance.
    """

    def __init__(self, message: str, spec: Optional[Any] = None) -> None:
        """
        Initialize EmptyFootprintError.

        Args:
            message: Description of the failure
            spec: The HoleSpec that produced the empty footprint
        """
        super().__init__(message)
        self.spec = spec


class NonMonotoneFieldError(ForceDynError):
    """
    Raised when the normal contact force decreases with descent depth.

    The penalty contact model is monotone by construction, so this signals a
    geometry bug rather than a recoverable condition.
    """

    def __init__(self, message: str, depth: float, fz: float) -> None:
        """
        Initialize NonMonotoneFieldError.

        Args:
            message: Description of the failure
            depth: Descent depth (mm) where the violation was detected
            fz: Normal force (N) observed at that depth
        """
        super().__init__(message)
        self.depth = depth
        self.fz = fz


class DivergenceError(ForceDynError):
    """
    Raised when a training loss becomes NaN or infinite.
    """

    def __init__(self, message: str, episode: int, loss: float) -> None:
        """
        Initialize DivergenceError.

        Args:
            message: Description of the failure
            episode: Episode index at which the loss diverged
            loss: The offending loss value
        """
        super().__init__(message)
        self.episode = episode
        self.loss = loss


class DatasetFormatError(ForceDynError):
    """
    Raised when a dataset or grid file cannot be parsed.

    This exception is raised when:
    - the header line is missing or malformed
    - a row has the wrong number of fields or non-numeric values
    - the file ends in the middle of a trajectory
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line_number: Optional[int] = None,
    ) -> None:
        """
        Initialize DatasetFormatError.

        Args:
            message: Description of the parsing error
            path: File that caused the error
            line_number: 1-based line number of the offending line
        """
        if line_number is not None:
            message = f"{message} (line {line_number})"
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line_number = line_number


class ModelFormatError(ForceDynError):
    """
    Raised when a model or policy container is corrupt.

    This exception is raised when:
    - the XML cannot be parsed
    - a parameter block cannot be decoded or has the wrong size
    - a required section is missing
    """

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        """
        Initialize ModelFormatError.

        Args:
            message: Description of the error
            path: Container file that caused the error
        """
        super().__init__(message)
        self.path = path


class ModelVersionError(ModelFormatError):
    """
    Raised when a container has the wrong magic string or format version.
    """

    def __init__(
        self,
        message: str,
        found: Optional[str] = None,
        expected: Optional[str] = None,
        path: Optional[str] = None,
    ) -> None:
        """
        Initialize ModelVersionError.

        Args:
            message: Description of the error
            found: Version (or magic) found in the file
            expected: Version (or magic) this package writes
            path: Container file that caused the error
        """
        super().__init__(message, path=path)
        self.found = found
        self.expected = expected


class ConfigError(ForceDynError):
    """
    Raised when an experiment configuration is invalid.

    This exception is raised when:
    - a section or key is unknown
    - a ``--set`` override is not of the form ``section.key=value``
    - a value has the wrong type or violates a range constraint
    """

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        """
        Initialize ConfigError.

        Args:
            message: Description of the configuration error
            key: Dotted key that caused the error
        """
        super().__init__(message)
        self.key = key


class ReportSchemaError(ForceDynError):
    """
    Raised when result CSVs being aggregated do not share a schema.
    """

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        """
        Initialize ReportSchemaError.

        Args:
            message: Description of the mismatch
            path: CSV file with the unexpected header
        """
        super().__init__(message)
        self.path = path
