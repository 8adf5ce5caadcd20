"""HTTP JSON API over an archive engine.

Read endpoints serve from an immutable engine snapshot; metadata edits
append to the overlay file and swap in a freshly built snapshot, so
concurrent readers always see a consistent archive version.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import httpx
import numpy as np
from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .engine import ArchiveEngine, load_engine
from .errors import (
    DimensionError,
    NoLabelError,
    NormalizationError,
    ParameterError,
    QueryError,
    StatuaryError,
)
from .manifest import append_overlay_edit
from .model import METADATA_FIELDS
from .neighborhood import MapParams, build_map
from .textindex import QueryResult

MAX_K = 200
DEFAULT_MAP_EPOCHS = 50


@dataclass
class ApiConfig:
    archive_root: str
    port: int = 8080
    extractor_url: Optional[str] = None
    default_k: int = 20
    cors_allow: list[str] = dc_field(default_factory=list)
    seed: int = 42

    @classmethod
    def from_file(cls, path: str | Path) -> "ApiConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)


def _error(status: int, code: str, message: str, detail: str = "") -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "detail": detail})


def _result_payload(r: QueryResult) -> dict:
    return {
        "id": r.entity_id,
        "score": r.score,
        "rank": r.rank,
        "facets": [
            {"field": f, "value": v,
             "url": str(httpx.URL("/api/search", params={f: v}))}
            for f, v in r.facets
        ],
    }


def _clamp_k(k: int) -> int:
    return min(k, MAX_K)


class ServiceState:
    """Holds the current engine snapshot; swaps are atomic reference moves."""

    def __init__(self, config: ApiConfig):
        self.config = config
        self._edit_lock = threading.Lock()
        self._version = 1
        self.engine: ArchiveEngine = load_engine(config.archive_root, version=1)
        self._map_cache: dict[tuple, list[dict]] = {}

    def apply_edit(self, statue_id: str, field_name: str, value: str | None) -> None:
        with self._edit_lock:
            append_overlay_edit(Path(self.config.archive_root) / "overlay.jsonl",
                                statue_id, field_name, value)
            self._version += 1
            self.engine = load_engine(self.config.archive_root, version=self._version)
            self._map_cache.clear()

    def map_layout(self, key: tuple, ids: list[str], rows: np.ndarray) -> list[dict]:
        cache_key = (self.engine.version, *key)
        if cache_key not in self._map_cache:
            params = MapParams(epochs=DEFAULT_MAP_EPOCHS)
            layout = build_map(rows, ids, params, seed=self.config.seed)
            self._map_cache[cache_key] = layout.to_records()
        return self._map_cache[cache_key]


def create_app(config: ApiConfig) -> FastAPI:
    app = FastAPI(title="statuary", version="0.1.0")
    state = ServiceState(config)
    app.state.service = state

    if config.cors_allow:
        app.add_middleware(CORSMiddleware, allow_origins=config.cors_allow,
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(StatuaryError)
    async def statuary_error(_request: Request, exc: StatuaryError):
        status = 400
        if isinstance(exc, NoLabelError):
            status = 404
        return _error(status, type(exc).__name__, str(exc))

    # -- search ------------------------------------------------------------

    @app.get("/api/search")
    def search(request: Request, q: str | None = None, field: str | None = None,
               k: int | None = None, offset: int = 0):
        engine = state.engine
        filters = {}
        for fname in METADATA_FIELDS:
            value = request.query_params.get(fname)
            if value is not None:
                filters[fname] = value
        unknown = set(request.query_params) - set(METADATA_FIELDS) - {
            "q", "field", "k", "offset"}
        if unknown:
            return _error(400, "ParameterError",
                          f"unknown query parameters: {sorted(unknown)}")
        k_eff = _clamp_k(k if k is not None else config.default_k)
        if k_eff < 1:
            return _error(400, "ParameterError", "k must be >= 1")
        if offset < 0:
            return _error(400, "ParameterError", "offset must be >= 0")
        if q is None and not filters:
            return _error(400, "QueryError", "need q or at least one metadata filter")
        try:
            results = engine.hybrid_search(text=q, filters=filters,
                                           k=k_eff + offset, field_name=field)
        except QueryError as exc:
            return _error(400, "QueryError", str(exc))
        page = results[offset:offset + k_eff]
        return {"query": q, "filters": filters, "k": k_eff, "offset": offset,
                "total": len(results),
                "results": [_result_payload(r) for r in page],
                "archive_version": engine.version}

    @app.post("/api/search/vector")
    def search_vector(body: dict):
        engine = state.engine
        namespace = body.get("namespace", "global")
        if namespace not in engine.stores:
            return _error(400, "ParameterError", f"unknown namespace {namespace!r}")
        vector = body.get("vector")
        if not isinstance(vector, list) or not vector:
            return _error(400, "ParameterError", "vector must be a non-empty list")
        k = body.get("k", config.default_k)
        if not isinstance(k, int) or k < 1:
            return _error(400, "ParameterError", "k must be a positive integer")
        filters = body.get("filters") or {}
        if any(f not in METADATA_FIELDS for f in filters):
            return _error(400, "ParameterError", "unknown filter field")
        try:
            results = engine.hybrid_search(vector=np.array(vector, dtype=np.float64),
                                           namespace=namespace, filters=filters,
                                           k=_clamp_k(k))
        except (DimensionError, NormalizationError) as exc:
            return _error(400, type(exc).__name__, str(exc))
        return {"namespace": namespace, "results": [_result_payload(r) for r in results],
                "archive_version": engine.version}

    @app.post("/api/search/image")
    async def search_image(image: UploadFile = File(...),
                           bbox: str | None = Form(default=None),
                           k: int = Form(default=0)):
        engine = state.engine
        if config.extractor_url is None:
            return _error(501, "ExtractorUnset",
                          "image queries need an extractor endpoint",
                          "set extractor_url in the service config")
        k_eff = _clamp_k(k or config.default_k)
        data = await image.read()
        form: dict = {}
        if bbox:
            try:
                [float(v) for v in bbox.split(",")]
            except ValueError:
                return _error(400, "ParameterError", "bbox must be x,y,w,h")
            form["bbox"] = bbox
        try:
            resp = httpx.post(f"{config.extractor_url.rstrip('/')}/embed",
                              files={"image": (image.filename or "query", data)},
                              data=form, timeout=30.0)
        except httpx.HTTPError as exc:
            return _error(502, "ExtractorUnreachable", str(exc))
        if resp.status_code != 200:
            return _error(502, "ExtractorError",
                          f"extractor returned {resp.status_code}", resp.text[:500])
        out = resp.json()
        global_hits = engine.hybrid_search(
            vector=np.array(out["global"], dtype=np.float64), k=k_eff)
        face_groups = []
        for face in out.get("faces", []):
            hits = engine.hybrid_search(vector=np.array(face["vector"], dtype=np.float64),
                                        namespace="face", k=k_eff)
            face_groups.append({"bbox": face.get("bbox"),
                                "results": [_result_payload(r) for r in hits]})
        return {"global": [_result_payload(r) for r in global_hits],
                "faces": face_groups, "archive_version": engine.version}

    # -- statues -----------------------------------------------------------

    @app.get("/api/statues/{statue_id}")
    def statue_detail(statue_id: str):
        engine = state.engine
        statue = engine.statues.get(statue_id)
        if statue is None:
            return _error(404, "NotFound", f"unknown statue {statue_id}")
        images = [engine.images[i].to_dict() for i in statue.image_ids
                  if i in engine.images]
        predictions = {}
        face_rows = [r.face_row for i in statue.image_ids
                     for r in engine.images.get(i).face_regions
                     if engine.images.get(i) and r.face_row is not None]
        if face_rows and "face" in engine.stores:
            q = engine.stores["face"].matrix[face_rows[0]]
            for fname in METADATA_FIELDS:
                if statue.metadata.get(fname) is not None:
                    continue
                try:
                    label, confidence = engine.predict_labels(
                        q, fname, k_vote=5, exclude_statue=statue_id)
                except NoLabelError:
                    continue
                predictions[fname] = {"label": label, "confidence": confidence}
        facets = [{"field": f, "value": v,
                   "url": str(httpx.URL("/api/search", params={f: v}))}
                  for f, v in engine.facets_for(statue)]
        return {"id": statue.id, "metadata": statue.metadata.to_dict(),
                "canonical_image": statue.canonical_image, "images": images,
                "predicted": predictions, "facets": facets,
                "archive_version": engine.version}

    @app.patch("/api/statues/{statue_id}")
    def statue_edit(statue_id: str, body: dict):
        engine = state.engine
        statue = engine.statues.get(statue_id)
        if statue is None:
            return _error(404, "NotFound", f"unknown statue {statue_id}")
        if not body:
            return _error(400, "ParameterError", "no fields to update")
        gazetteer = engine.gazetteer
        for fname, value in body.items():
            if fname not in METADATA_FIELDS:
                return _error(400, "ParameterError", f"unknown metadata field {fname!r}")
            if value is not None and gazetteer is not None and \
                    not gazetteer.is_canonical(fname, value):
                return JSONResponse(status_code=422, content={
                    "code": "NonCanonicalValue",
                    "message": f"{value!r} is not a canonical {fname} value",
                    "detail": "",
                    "suggestions": gazetteer.suggest(fname, value)})
        for fname, value in body.items():
            state.apply_edit(statue_id, fname, value)
        return statue_detail(statue_id)

    # -- exploration -------------------------------------------------------

    @app.get("/api/map")
    def neighborhood_map(scope: str = "all", namespace: str = "global",
                         q: str | None = None, field: str | None = None,
                         request: Request = None):
        engine = state.engine
        store = engine.stores.get(namespace)
        if store is None:
            return _error(400, "ParameterError", f"unknown namespace {namespace!r}")
        if scope == "all":
            ids, rows = store.row_ids, store.matrix
            key = ("all", namespace)
        elif scope == "query":
            filters = {fname: request.query_params[fname] for fname in METADATA_FIELDS
                       if fname in request.query_params}
            if q is None and not filters:
                return _error(400, "QueryError", "scope=query needs q or filters")
            hits = engine.hybrid_search(text=q, filters=filters,
                                        k=MAX_K, field_name=field)
            statue_ids = {h.entity_id for h in hits}
            keep = [i for i, rid in enumerate(store.row_ids)
                    if engine.statue_of(rid, namespace) in statue_ids]
            if not keep:
                return {"scope": scope, "points": [],
                        "archive_version": engine.version}
            ids = [store.row_ids[i] for i in keep]
            rows = store.matrix[keep]
            key = ("query", namespace, q or "", tuple(sorted(filters.items())))
        else:
            return _error(400, "ParameterError", "scope must be 'all' or 'query'")
        points = state.map_layout(key, list(ids), rows)
        return {"scope": scope, "namespace": namespace, "points": points,
                "archive_version": engine.version}

    @app.get("/api/images/{image_id}/neighbors")
    def image_neighbors(image_id: str, k: int = 10):
        engine = state.engine
        img = engine.images.get(image_id)
        if img is None:
            return _error(404, "NotFound", f"unknown image {image_id}")
        if img.global_row is None:
            return _error(404, "NotFound", f"image {image_id} has no embedding")
        if k < 1:
            return _error(400, "ParameterError", "k must be >= 1")
        q = np.asarray(engine.stores["global"].matrix[img.global_row], dtype=np.float64)
        hits = engine.knn_images(q, _clamp_k(k), exclude={image_id})
        return {"id": image_id,
                "neighbors": [{"id": h.entity_id, "score": h.score, "rank": h.rank,
                               "statue_id": engine.statue_of(h.entity_id, "global")}
                              for h in hits],
                "archive_version": engine.version}

    @app.get("/api/health")
    def health():
        engine = state.engine
        return {"status": "ok", "archive_version": engine.version,
                "counts": engine.counts()}

    return app


def run_server(config: ApiConfig) -> None:  # pragma: no cover - thin wrapper
    import uvicorn

    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port)
