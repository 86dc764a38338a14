"""Exception hierarchy shared by every stage.

Each class carries the process exit code the CLI maps it to:
2 = usage/config, 3 = data, 4 = numerical.
"""

from typing import Any


class CGCError(Exception):
    exit_code = 1


class ConfigError(CGCError):
    """Invalid preset, flag or parameter value."""

    exit_code = 2


class DataError(CGCError):
    exit_code = 3


class StructuralError(DataError):
    """Graph or matrix shapes/structure violate an invariant."""


class MissingClassError(DataError):
    """A class has no training node."""


class ParseError(DataError):
    """A raw input line could not be parsed."""


class ClusteringError(DataError):
    """A class has fewer pool rows than requested sub-classes."""


class DatasetFormatError(DataError):
    pass


class VersionMismatchError(DatasetFormatError):
    pass


class SizeMismatchError(DatasetFormatError):
    pass


class MaskOverlapError(DatasetFormatError):
    pass


class NumericalError(CGCError):
    exit_code = 4

    def __init__(
        self, message: str, diagnostics: dict[str, Any] | None = None
    ) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}
