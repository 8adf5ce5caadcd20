"""Archive manifest: JSON-lines records for images and statues.

Each line is one record tagged with its kind; an optional overlay file
holds append-only metadata edits applied on top of the manifest.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

from .model import ArchiveImage, StatueRecord


def write_manifest(path: str | Path, images: list[ArchiveImage],
                   statues: list[StatueRecord] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for img in images:
            fh.write(json.dumps({"kind": "image", **img.to_dict()}, ensure_ascii=False,
                                sort_keys=True) + "\n")
        for statue in statues or []:
            fh.write(json.dumps({"kind": "statue", **statue.to_dict()}, ensure_ascii=False,
                                sort_keys=True) + "\n")


def read_manifest(path: str | Path) -> tuple[dict[str, ArchiveImage], dict[str, StatueRecord]]:
    images: dict[str, ArchiveImage] = {}
    statues: dict[str, StatueRecord] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            kind = record.pop("kind", None)
            if kind == "image":
                img = ArchiveImage.from_dict(record)
                images[img.id] = img
            elif kind == "statue":
                statue = StatueRecord.from_dict(record)
                statues[statue.id] = statue
            else:
                raise ValueError(f"{path}:{lineno}: unknown record kind {kind!r}")
    return images, statues


def append_overlay_edit(path: str | Path, statue_id: str, field_name: str,
                        value: str | None) -> None:
    """Record one metadata edit; the source manifest stays read-only."""
    edit = {"statue_id": statue_id, "field": field_name, "value": value,
            "ts": int(time.time())}
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(edit, ensure_ascii=False, sort_keys=True) + "\n")


def read_overlay(path: str | Path) -> list[dict]:
    p = Path(path)
    if not p.exists():
        return []
    edits = []
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                edits.append(json.loads(line))
    return edits


def apply_overlay(statues: dict[str, StatueRecord], edits: list[dict]) -> None:
    """Apply edits in file order; unknown statues are skipped silently."""
    for edit in edits:
        statue = statues.get(edit["statue_id"])
        if statue is not None:
            statue.metadata.set(edit["field"], edit["value"])
