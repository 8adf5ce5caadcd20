"""HTTP sidecar: POST /embed (multipart image, optional bbox) -> vectors."""
from __future__ import annotations

import io

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse
from PIL import Image, UnidentifiedImageError

from .embedder import DIM_FACE, DIM_GLOBAL, detect_faces, embed_image


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "detail": ""})


def create_app() -> FastAPI:
    app = FastAPI(title="statuary-extractor", version="0.1.0")

    @app.post("/embed")
    async def embed(image: UploadFile = File(...),
                    bbox: str | None = Form(default=None)):
        data = await image.read()
        try:
            img = Image.open(io.BytesIO(data))
            img.load()
        except (UnidentifiedImageError, OSError):
            return _error(422, "UndecodableImage", "could not decode image bytes")
        crop = None
        if bbox:
            try:
                x, y, w, h = (float(v) for v in bbox.split(","))
            except ValueError:
                return _error(422, "BadBbox", "bbox must be x,y,w,h")
            if w <= 0 or h <= 0:
                return _error(422, "BadBbox", "bbox needs positive width and height")
            crop = (x, y, w, h)
            img = img.crop((int(x), int(y), int(x + w), int(y + h)))
        faces = [{"bbox": [float(v) for v in fb],
                  "vector": [float(v) for v in embed_image(img, fb)]}
                 for fb in detect_faces(img)]
        return {"global": [float(v) for v in embed_image(img)],
                "faces": faces,
                "dims": {"global": DIM_GLOBAL, "face": DIM_FACE},
                "crop": list(crop) if crop else None}

    @app.get("/health")
    def health():
        return {"status": "ok", "dims": {"global": DIM_GLOBAL, "face": DIM_FACE}}

    return app
