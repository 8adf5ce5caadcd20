"""Archive consistency checking.

Violations are reported, never raised: curation tooling wants the full
list of problems in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import ArchiveImage, StatueRecord, VectorStore


@dataclass
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def by_code(self, code: str) -> list[Violation]:
        return [v for v in self.violations if v.code == code]


def validate_archive(
    images: list[ArchiveImage] | dict[str, ArchiveImage],
    statues: list[StatueRecord] | dict[str, StatueRecord],
    stores: dict[str, VectorStore],
) -> ValidationReport:
    """Check every structural invariant of the archive.

    An empty report means the archive is consistent.
    """
    if isinstance(images, dict):
        images = list(images.values())
    if isinstance(statues, dict):
        statues = list(statues.values())
    report = ValidationReport()

    image_ids: set[str] = set()
    for img in images:
        if img.id in image_ids:
            report.add("duplicate-image-id", f"image id {img.id} appears more than once")
        image_ids.add(img.id)

    global_store = stores.get("global")
    face_store = stores.get("face")
    for store in stores.values():
        bad_rows = store.check_unit_norm()
        for row in bad_rows:
            report.add("non-unit-row", f"{store.namespace} store row {row} is not unit-norm")

    face_ids: set[str] = set()
    for img in images:
        if img.global_row is not None:
            if global_store is None or not (0 <= img.global_row < global_store.count):
                report.add("dangling-row",
                           f"image {img.id} references global row {img.global_row}")
        for region in img.face_regions:
            if region.face_id in face_ids:
                report.add("duplicate-face-id", f"face id {region.face_id} is not unique")
            face_ids.add(region.face_id)
            if region.image_id != img.id:
                report.add("face-image-mismatch",
                           f"face {region.face_id} names image {region.image_id}, "
                           f"attached to {img.id}")
            x, y, w, h = region.bbox
            if w <= 0 or h <= 0:
                report.add("bad-bbox", f"face {region.face_id} has non-positive extent")
            if region.face_row is not None:
                if face_store is None or not (0 <= region.face_row < face_store.count):
                    report.add("dangling-row",
                               f"face {region.face_id} references face row {region.face_row}")

    statue_ids: set[str] = set()
    assigned: dict[str, str] = {}
    for statue in statues:
        if statue.id in statue_ids:
            report.add("duplicate-statue-id", f"statue id {statue.id} appears more than once")
        statue_ids.add(statue.id)
        if not statue.image_ids:
            report.add("empty-statue", f"statue {statue.id} has no images")
        for iid in statue.image_ids:
            if iid not in image_ids:
                report.add("unknown-image", f"statue {statue.id} references unknown image {iid}")
            if iid in assigned:
                report.add("partition-violation",
                           f"image {iid} belongs to both {assigned[iid]} and {statue.id}")
            else:
                assigned[iid] = statue.id
        if statue.canonical_image not in statue.image_ids:
            report.add("bad-canonical", f"statue {statue.id} canonical image is not a member")

    for img in images:
        if img.statue_id is not None and img.statue_id not in statue_ids:
            report.add("unknown-statue", f"image {img.id} references unknown statue {img.statue_id}")

    return report
