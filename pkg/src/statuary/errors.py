"""Exception types shared across the engine."""


class StatuaryError(Exception):
    """Base class for all engine errors."""


class NormalizationError(StatuaryError):
    """Raised when a vector cannot be normalized (zero norm)."""


class DimensionError(StatuaryError):
    """Raised when vector dimensions do not match."""


class FormatError(StatuaryError):
    """Raised on a malformed VECF file. Carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class FieldError(StatuaryError):
    """Raised when a query names an unknown index field."""


class ParameterError(StatuaryError):
    """Raised on out-of-range search or layout parameters."""


class QueryError(StatuaryError):
    """Raised when a hybrid query has neither text nor vector."""


class NoLabelError(StatuaryError):
    """Raised when no labeled neighbor exists for label prediction."""


class OverrideError(StatuaryError):
    """Raised when an override script references unknown entities.

    Carries the 1-based line number of the offending operation.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInputError(StatuaryError):
    """Raised when an operation requires at least one input vector."""


class GazetteerError(StatuaryError):
    """Raised on a malformed or inconsistent gazetteer file."""
