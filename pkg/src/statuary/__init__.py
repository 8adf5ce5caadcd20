"""statuary: content-based retrieval and curation for statue photo archives."""

from .errors import (
    DimensionError,
    EmptyInputError,
    FieldError,
    FormatError,
    GazetteerError,
    NoLabelError,
    NormalizationError,
    OverrideError,
    ParameterError,
    QueryError,
    StatuaryError,
)
from .model import (
    METADATA_FIELDS,
    ArchiveImage,
    FaceRegion,
    MetadataRecord,
    StatueRecord,
    VectorStore,
    cosine_similarity,
    l2_normalize,
)
from .vecf import read_vector_store, write_vector_store

__all__ = [
    "ArchiveImage",
    "DimensionError",
    "EmptyInputError",
    "FaceRegion",
    "FieldError",
    "FormatError",
    "GazetteerError",
    "METADATA_FIELDS",
    "MetadataRecord",
    "NoLabelError",
    "NormalizationError",
    "OverrideError",
    "ParameterError",
    "QueryError",
    "StatuaryError",
    "StatueRecord",
    "VectorStore",
    "cosine_similarity",
    "l2_normalize",
    "read_vector_store",
    "write_vector_store",
]

__version__ = "0.1.0"
