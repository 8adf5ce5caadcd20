"""Filesystem ingestion: scan a picture tree into manifest records.

The tree is the only source of truth at ingest time: ids derive from the
relative path, timestamps from file modification time, and metadata from
path tokens run through the gazetteer.
"""
from __future__ import annotations

import hashlib
import os
from pathlib import Path

from .metadata import Gazetteer, extract_metadata
from .model import ArchiveImage

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".gif", ".bmp", ".tif", ".tiff", ".webp"}


def image_id_for(rel_path: str) -> str:
    """Stable id: short path hash plus the filename stem for readability."""
    digest = hashlib.sha256(rel_path.encode("utf-8", "surrogatepass")).hexdigest()[:12]
    stem = Path(rel_path).stem[:24] or "img"
    return f"img:{digest}:{stem}"


def scan_tree(root: str | Path) -> tuple[list[ArchiveImage], list[str]]:
    """Walk the archive root and build one image record per picture file.

    Files whose names cannot be decoded cleanly are kept, flagged, and
    excluded from metadata extraction rather than aborting the scan.
    """
    root = Path(root)
    images: list[ArchiveImage] = []
    warnings: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(dirpath) / name
            rel = full.relative_to(root).as_posix()
            if Path(name).suffix.lower() not in IMAGE_EXTENSIONS:
                continue
            flags = []
            try:
                rel.encode("utf-8")
                decodable = True
            except UnicodeEncodeError:
                decodable = False
                flags.append("undecodable-filename")
                warnings.append(f"undecodable filename bytes under {dirpath!r}")
            try:
                timestamp = int(full.stat().st_mtime)
            except OSError:
                timestamp = None
                flags.append("stat-failed")
            img = ArchiveImage(
                id=image_id_for(rel),
                path=rel if decodable else rel.encode("utf-8", "replace").decode("utf-8"),
                folder_id=Path(rel).parent.as_posix(),
                timestamp=timestamp,
                flags=flags,
            )
            images.append(img)
    images.sort(key=lambda im: im.path)
    return images, warnings


def extract_all(images: list[ArchiveImage], gazetteer: Gazetteer) -> dict[str, dict]:
    """Per-image metadata records keyed by image id (skips flagged paths)."""
    out = {}
    for img in images:
        if "undecodable-filename" in img.flags:
            continue
        out[img.id] = extract_metadata(img.path, gazetteer).to_dict()
    return out
