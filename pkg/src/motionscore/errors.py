"""Exception hierarchy shared across the library."""


class MotionScoreError(Exception):
    """Base class for all library errors."""


class ParseError(MotionScoreError):
    """A file could not be decoded or is missing required fields."""


class ValidationError(MotionScoreError):
    """Data violates a declared invariant (names the invariant in its message)."""


class SchemaError(MotionScoreError):
    """Shapes, orderings, or selectors do not match the skeleton contract."""


class ConfigError(MotionScoreError):
    """A threshold, weight, or grid parameter is out of its legal range."""


class NoDataError(MotionScoreError):
    """No usable data remains after filtering (empty input, zero valid frames)."""


class InsufficientDataError(MotionScoreError):
    """A sequence is too short for the requested computation."""


class DegenerateGeometryError(MotionScoreError):
    """A triangle or mesh is geometrically degenerate."""


class UndefinedCorrelationError(MotionScoreError):
    """Rank correlation is undefined (a constant input vector)."""
