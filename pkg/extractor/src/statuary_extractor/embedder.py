"""Toy deterministic embedder: downscaled luminance grids, unit-normalized.

Stands in for a real image and face model so the full stack can be tested
without model weights. The contract it honors is fixed: constant dims,
unit norms, and bbox crops applied before embedding.
"""
from __future__ import annotations

import numpy as np
from PIL import Image

GRID = 8
DIM_GLOBAL = GRID * GRID
DIM_FACE = GRID * GRID

# a face is "detected" when the image center is brighter than the whole
FACE_BRIGHTNESS_RATIO = 1.05
MIN_FACE_SIDE = 16


def _luminance_grid(img: Image.Image) -> np.ndarray:
    gray = img.convert("L").resize((GRID, GRID), Image.BILINEAR)
    return np.asarray(gray, dtype=np.float64).ravel() / 255.0


def embed_image(img: Image.Image, bbox: tuple[float, float, float, float] | None = None,
                ) -> np.ndarray:
    """Unit-norm embedding of an image, optionally of a crop of it."""
    if bbox is not None:
        x, y, w, h = bbox
        img = img.crop((int(x), int(y), int(x + w), int(y + h)))
    grid = _luminance_grid(img)
    v = grid - grid.mean()
    norm = float(np.linalg.norm(v))
    if norm < 1e-9:
        # flat image: fall back to a fixed basis direction
        v = np.zeros(DIM_GLOBAL)
        v[0] = 1.0
        return v.astype(np.float32)
    return (v / norm).astype(np.float32)


def detect_faces(img: Image.Image) -> list[tuple[int, int, int, int]]:
    """Zero or one centered box, by a brightness heuristic."""
    w, h = img.size
    if w < MIN_FACE_SIDE or h < MIN_FACE_SIDE:
        return []
    gray = np.asarray(img.convert("L"), dtype=np.float64)
    box = (w // 4, h // 4, w // 2, h // 2)
    x, y, bw, bh = box
    center = gray[y:y + bh, x:x + bw]
    overall = gray.mean()
    if overall <= 0 or center.mean() / overall < FACE_BRIGHTNESS_RATIO:
        return []
    return [box]


def extract(img: Image.Image) -> dict:
    """Full extractor output: global vector plus per-face bbox and vector."""
    faces = []
    for bbox in detect_faces(img):
        faces.append({
            "bbox": [float(v) for v in bbox],
            "vector": [float(v) for v in embed_image(img, bbox)],
        })
    return {"global": [float(v) for v in embed_image(img)], "faces": faces}
