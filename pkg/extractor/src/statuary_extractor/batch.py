"""Batch extraction: image directory -> VECF stores plus manifest rows."""
from __future__ import annotations

import os
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from statuary.ingest import IMAGE_EXTENSIONS, image_id_for
from statuary.model import ArchiveImage, FaceRegion, VectorStore

from .embedder import DIM_FACE, DIM_GLOBAL, detect_faces, embed_image


def extract_tree(root: str | Path):
    """Embed every readable picture under root.

    Returns (images, global_store, face_store, warnings). Unreadable
    files keep a flagged manifest row but contribute no vector rows.
    """
    root = Path(root)
    images: list[ArchiveImage] = []
    warnings: list[str] = []
    global_rows, global_ids = [], []
    face_rows, face_ids = [], []
    entries = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if Path(name).suffix.lower() in IMAGE_EXTENSIONS:
                entries.append(Path(dirpath) / name)
    entries.sort(key=lambda p: p.relative_to(root).as_posix())

    for full in entries:
        rel = full.relative_to(root).as_posix()
        iid = image_id_for(rel)
        record = ArchiveImage(id=iid, path=rel, folder_id=Path(rel).parent.as_posix(),
                              timestamp=int(full.stat().st_mtime))
        try:
            with Image.open(full) as img:
                img.load()
                record.global_row = len(global_rows)
                global_rows.append(embed_image(img))
                global_ids.append(iid)
                for n, bbox in enumerate(detect_faces(img)):
                    fid = f"face:{iid.split(':', 1)[1]}:{n}"
                    record.face_regions.append(
                        FaceRegion(fid, iid, tuple(float(v) for v in bbox),
                                   face_row=len(face_rows)))
                    face_rows.append(embed_image(img, bbox))
                    face_ids.append(fid)
        except (UnidentifiedImageError, OSError) as exc:
            record.flags.append("unreadable")
            warnings.append(f"{rel}: {exc}")
        images.append(record)

    global_store = VectorStore.from_rows("global", global_rows, global_ids,
                                         dim=DIM_GLOBAL, normalize=False)
    face_store = VectorStore.from_rows("face", face_rows, face_ids,
                                       dim=DIM_FACE, normalize=False)
    return images, global_store, face_store, warnings
