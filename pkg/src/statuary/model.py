"""Core data model: images, faces, statues, metadata and vector stores.

All embedding vectors are stored as float32 and L2-normalized at ingest;
similarity is the dot product of unit vectors, accumulated in float64.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields
from typing import Optional

import numpy as np

from .errors import DimensionError, NormalizationError

NAMESPACES = ("global", "face")

SOURCE_KINDS = ("museum", "onsite", "treasure", "field", "scan")

#: Metadata field inventory, in canonical reporting order.
METADATA_FIELDS = (
    "statue_type",
    "era",
    "temple",
    "country_taken",
    "region_taken",
    "city_taken",
    "country_origin",
    "region_origin",
    "city_origin",
)

UNIT_NORM_TOL = 1e-5


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Return ``v`` scaled to unit L2 norm, as float32.

    Raises NormalizationError for the zero vector.
    """
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        raise NormalizationError("cannot normalize a zero or non-finite vector")
    return (v / norm).astype(np.float32)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors, accumulated in float64."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.astype(np.float64), b.astype(np.float64)))


@dataclass
class MetadataRecord:
    """Optional typed metadata fields recovered from paths or edits.

    Every populated value must be a canonical value of the gazetteer.
    """

    statue_type: Optional[str] = None
    era: Optional[str] = None
    temple: Optional[str] = None
    country_taken: Optional[str] = None
    region_taken: Optional[str] = None
    city_taken: Optional[str] = None
    country_origin: Optional[str] = None
    region_origin: Optional[str] = None
    city_origin: Optional[str] = None

    def get(self, field_name: str) -> Optional[str]:
        if field_name not in METADATA_FIELDS:
            raise KeyError(field_name)
        return getattr(self, field_name)

    def set(self, field_name: str, value: Optional[str]) -> None:
        if field_name not in METADATA_FIELDS:
            raise KeyError(field_name)
        setattr(self, field_name, value)

    def populated(self) -> dict[str, str]:
        """Mapping of set fields to their values, in inventory order."""
        return {f: getattr(self, f) for f in METADATA_FIELDS if getattr(self, f) is not None}

    def to_dict(self) -> dict:
        return self.populated()

    @classmethod
    def from_dict(cls, d: dict) -> "MetadataRecord":
        rec = cls()
        for f in METADATA_FIELDS:
            if d.get(f) is not None:
                setattr(rec, f, d[f])
        return rec


@dataclass
class FaceRegion:
    face_id: str
    image_id: str
    bbox: tuple[float, float, float, float]  # (x, y, w, h), w > 0, h > 0
    face_row: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"face_id": self.face_id, "image_id": self.image_id, "bbox": list(self.bbox)}
        if self.face_row is not None:
            d["face_row"] = self.face_row
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FaceRegion":
        return cls(
            face_id=d["face_id"],
            image_id=d["image_id"],
            bbox=tuple(d["bbox"]),
            face_row=d.get("face_row"),
        )


@dataclass
class ArchiveImage:
    id: str
    path: str
    folder_id: str
    timestamp: Optional[int] = None
    global_row: Optional[int] = None
    face_regions: list[FaceRegion] = field(default_factory=list)
    statue_id: Optional[str] = None
    source_kind: Optional[str] = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "path": self.path, "folder_id": self.folder_id}
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        if self.global_row is not None:
            d["global_row"] = self.global_row
        if self.face_regions:
            d["face_regions"] = [r.to_dict() for r in self.face_regions]
        if self.statue_id is not None:
            d["statue_id"] = self.statue_id
        if self.source_kind is not None:
            d["source_kind"] = self.source_kind
        if self.flags:
            d["flags"] = self.flags
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ArchiveImage":
        return cls(
            id=d["id"],
            path=d["path"],
            folder_id=d["folder_id"],
            timestamp=d.get("timestamp"),
            global_row=d.get("global_row"),
            face_regions=[FaceRegion.from_dict(r) for r in d.get("face_regions", [])],
            statue_id=d.get("statue_id"),
            source_kind=d.get("source_kind"),
            flags=list(d.get("flags", [])),
        )


@dataclass
class StatueRecord:
    id: str
    image_ids: list[str]
    metadata: MetadataRecord = field(default_factory=MetadataRecord)
    canonical_image: Optional[str] = None

    def __post_init__(self):
        if not self.image_ids:
            raise ValueError(f"statue {self.id} has no images")
        if self.canonical_image is None:
            self.canonical_image = min(self.image_ids)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "image_ids": list(self.image_ids),
            "metadata": self.metadata.to_dict(),
            "canonical_image": self.canonical_image,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StatueRecord":
        return cls(
            id=d["id"],
            image_ids=list(d["image_ids"]),
            metadata=MetadataRecord.from_dict(d.get("metadata", {})),
            canonical_image=d.get("canonical_image"),
        )


class VectorStore:
    """A named namespace of fixed-dimension unit vectors with stable row ids.

    Immutable after construction; safe for concurrent readers.
    """

    def __init__(self, namespace: str, dim: int, matrix: np.ndarray, row_ids: list[str]):
        if namespace not in NAMESPACES:
            raise ValueError(f"unknown namespace {namespace!r}")
        if dim <= 0:
            raise ValueError("dim must be positive")
        matrix = np.ascontiguousarray(matrix, dtype=np.float32).reshape(-1, dim)
        if matrix.shape[0] != len(row_ids):
            raise ValueError("row_ids length does not match matrix row count")
        if len(set(row_ids)) != len(row_ids):
            raise ValueError("row_ids must be unique")
        self.namespace = namespace
        self.dim = dim
        self.matrix = matrix
        self.row_ids = list(row_ids)
        self._index = {rid: i for i, rid in enumerate(self.row_ids)}

    @property
    def count(self) -> int:
        return self.matrix.shape[0]

    def row_of(self, row_id: str) -> int:
        return self._index[row_id]

    def __contains__(self, row_id: str) -> bool:
        return row_id in self._index

    def vector(self, row_id: str) -> np.ndarray:
        return self.matrix[self._index[row_id]]

    def check_unit_norm(self, tol: float = UNIT_NORM_TOL) -> list[int]:
        """Row indices whose norm deviates from 1 by more than ``tol``."""
        if self.count == 0:
            return []
        norms = np.linalg.norm(self.matrix.astype(np.float64), axis=1)
        return [int(i) for i in np.nonzero(np.abs(norms - 1.0) > tol)[0]]

    @classmethod
    def from_rows(cls, namespace: str, rows, row_ids: list[str], dim: int | None = None,
                  normalize: bool = True) -> "VectorStore":
        """Build a store from raw rows, normalizing each unless told not to."""
        arr = np.asarray(rows, dtype=np.float64)
        if arr.size == 0:
            if dim is None:
                raise ValueError("dim is required for an empty store")
            arr = arr.reshape(0, dim)
        elif arr.ndim == 1:
            arr = arr.reshape(len(row_ids), -1)
        if normalize and arr.shape[0]:
            arr = np.stack([l2_normalize(r) for r in arr])
        return cls(namespace, arr.shape[1], arr.astype(np.float32), row_ids)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VectorStore)
            and self.namespace == other.namespace
            and self.dim == other.dim
            and self.row_ids == other.row_ids
            and self.matrix.tobytes() == other.matrix.tobytes()
        )
