"""Exception types shared across the pipeline.

Each failure category gets its own class so callers can discriminate
without parsing messages.
"""


class SlascoreError(Exception):
    """Base class for all pipeline errors."""


class AudioFormatError(SlascoreError):
    """Audio container or encoding does not match the accepted format."""


class AudioIOError(SlascoreError):
    """Audio file is unreadable or truncated."""


class ConfigError(SlascoreError):
    """Invalid or inconsistent configuration."""


class ShapeError(SlascoreError):
    """Array dimensions do not match the declared contract."""


class EmptyInputError(SlascoreError):
    """An operation that needs at least one element received none."""


class TensorLookupError(SlascoreError):
    """A required tensor key is missing from a file-backed store."""


class TensorIntegrityError(SlascoreError):
    """A tensor file is malformed or violates its declared contract."""


class DegenerateVectorError(SlascoreError):
    """A vector required to have nonzero norm is (numerically) zero."""


class DataError(SlascoreError):
    """A manifest entry or label is out of the accepted domain."""
