"""Hybrid retrieval engine over a loaded archive.

Combines the inverted text index with the flat vector indexes and the
statue registry; everything is built once and then treated as an
immutable snapshot, so concurrent readers need no locking. The service
layer swaps whole engines to apply edits.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NoLabelError, ParameterError, QueryError
from .manifest import apply_overlay, read_manifest, read_overlay
from .metadata import Gazetteer, coverage_report
from .model import METADATA_FIELDS, ArchiveImage, StatueRecord, VectorStore, l2_normalize
from .textindex import InvertedIndex, QueryResult, build_text_index, candidate_docs, text_search
from .vecf import read_vector_store
from .vectorindex import FlatIndex


def statue_text_views(statues: dict[str, StatueRecord],
                      images: dict[str, ArchiveImage]) -> dict[str, dict[str, str]]:
    """Text views indexed per statue: metadata fields plus member paths."""
    docs: dict[str, dict[str, str]] = {}
    for sid, statue in statues.items():
        fields = {f: v for f, v in statue.metadata.populated().items()}
        paths = [images[i].path for i in statue.image_ids if i in images]
        if paths:
            fields["path"] = " ".join(sorted(paths))
        docs[sid] = fields
    return docs


@dataclass
class ArchiveEngine:
    images: dict[str, ArchiveImage]
    statues: dict[str, StatueRecord]
    stores: dict[str, VectorStore]
    gazetteer: Gazetteer | None = None
    version: int = 0
    text_index: InvertedIndex = field(init=False)
    flat: dict[str, FlatIndex] = field(init=False)
    _image_statue: dict[str, str] = field(init=False)
    _face_statue: dict[str, str] = field(init=False)

    def __post_init__(self):
        self.text_index = build_text_index(statue_text_views(self.statues, self.images))
        self.flat = {ns: FlatIndex(store) for ns, store in self.stores.items()}
        self._image_statue = {}
        self._face_statue = {}
        for statue in self.statues.values():
            for iid in statue.image_ids:
                self._image_statue[iid] = statue.id
                img = self.images.get(iid)
                if img is not None:
                    for region in img.face_regions:
                        self._face_statue[region.face_id] = statue.id
        # images may also carry a direct assignment
        for img in self.images.values():
            if img.statue_id is not None and img.id not in self._image_statue:
                self._image_statue[img.id] = img.statue_id

    # -- entity resolution -------------------------------------------------

    def statue_of(self, entity_id: str, namespace: str) -> str | None:
        if namespace == "face":
            return self._face_statue.get(entity_id)
        return self._image_statue.get(entity_id)

    def counts(self) -> dict[str, int]:
        return {
            "images": len(self.images),
            "statues": len(self.statues),
            **{f"{ns}_vectors": s.count for ns, s in self.stores.items()},
        }

    def coverage(self) -> dict[str, int]:
        return coverage_report(self.statues)

    # -- filters -----------------------------------------------------------

    def _filter_statues(self, filters: dict[str, str]) -> set[str]:
        out = set()
        for sid, statue in self.statues.items():
            if all(statue.metadata.get(f) == v for f, v in filters.items()):
                out.add(sid)
        return out

    def facets_for(self, statue: StatueRecord) -> list[tuple[str, str]]:
        return sorted(statue.metadata.populated().items())

    # -- vector search -----------------------------------------------------

    def knn_images(self, q: np.ndarray, k: int, namespace: str = "global",
                   exclude: set[str] | None = None) -> list[QueryResult]:
        return self.flat[namespace].knn_exact(q, k, exclude=exclude)

    def statue_knn(self, q: np.ndarray, k: int, namespace: str = "global",
                   statue_filter: set[str] | None = None) -> list[QueryResult]:
        """Exact statue-level vector search; statue score = max member score.

        Rows whose entity is unassigned to a statue are skipped.
        """
        flat = self.flat[namespace]
        store = flat.store
        if statue_filter is not None:
            def predicate(rid):
                sid = self.statue_of(rid, namespace)
                return sid is not None and sid in statue_filter
        else:
            def predicate(rid):
                return self.statue_of(rid, namespace) is not None
        hits = flat.filtered_knn(q, store.count or 1, predicate)
        best: dict[str, float] = {}
        for hit in hits:
            sid = self.statue_of(hit.entity_id, namespace)
            if sid is not None and (sid not in best or hit.score > best[sid]):
                best[sid] = hit.score
        ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        return [
            QueryResult(entity_id=sid, score=score, rank=r,
                        facets=self.facets_for(self.statues[sid]))
            for r, (sid, score) in enumerate(ranked, start=1)
        ]

    # -- hybrid ------------------------------------------------------------

    def hybrid_search(self, text: str | None = None, vector: np.ndarray | None = None,
                      namespace: str = "global", filters: dict[str, str] | None = None,
                      k: int = 20, field_name: str | None = None) -> list[QueryResult]:
        """Statue-level hybrid query.

        Candidates pass the text query (AND semantics) and all metadata
        filters; a vector, when given, ranks candidates by cosine with
        max aggregation over member rows, otherwise the text score (or
        plain id order for pure filter queries) ranks them.
        """
        if k < 1:
            raise ParameterError("k must be >= 1")
        filters = filters or {}
        if text is None and vector is None and not filters:
            raise QueryError("query needs text, a vector, or at least one filter")

        candidates: set[str] | None = None
        if text is not None:
            candidates = candidate_docs(self.text_index, text, field_name)
        if filters:
            matching = self._filter_statues(filters)
            candidates = matching if candidates is None else candidates & matching

        if vector is not None:
            q = l2_normalize(np.asarray(vector, dtype=np.float64))
            return self.statue_knn(q, k, namespace=namespace, statue_filter=candidates)

        if text is not None:
            results = text_search(self.text_index, text, len(self.statues) or 1, field_name)
            results = [r for r in results if candidates is None or r.entity_id in candidates]
        else:
            results = [QueryResult(entity_id=sid, score=0.0, rank=0)
                       for sid in sorted(candidates or set())]
        results = results[:k]
        for rank, r in enumerate(results, start=1):
            r.rank = rank
            r.facets = self.facets_for(self.statues[r.entity_id])
        return results

    # -- label prediction --------------------------------------------------

    def predict_labels(self, face_vector: np.ndarray, field_name: str,
                       k_vote: int = 5,
                       exclude_statue: str | None = None) -> tuple[str, float]:
        """kNN vote over labeled faces: majority label and vote share.

        Neighbors are the k_vote nearest faces whose statue has the field
        populated; a tie goes to the label of the nearest tied neighbor.
        """
        if field_name not in METADATA_FIELDS:
            raise ParameterError(f"unknown metadata field {field_name!r}")
        if k_vote < 1:
            raise ParameterError("k_vote must be >= 1")
        store = self.stores.get("face")
        if store is None or store.count == 0:
            raise NoLabelError("face store is empty")
        q = l2_normalize(np.asarray(face_vector, dtype=np.float64))

        def labeled(face_id):
            sid = self._face_statue.get(face_id)
            if sid is None or sid == exclude_statue:
                return False
            return self.statues[sid].metadata.get(field_name) is not None

        hits = self.flat["face"].filtered_knn(q, k_vote, labeled)
        if not hits:
            raise NoLabelError(f"no labeled neighbor for field {field_name!r}")
        labels = [self.statues[self._face_statue[h.entity_id]].metadata.get(field_name)
                  for h in hits]
        counts = Counter(labels)
        top = max(counts.values())
        tied = {lab for lab, c in counts.items() if c == top}
        if len(tied) == 1:
            winner = tied.pop()
        else:
            winner = next(lab for lab in labels if lab in tied)  # nearest tied neighbor
        return winner, top / k_vote


def load_engine(archive_dir: str | Path, version: int = 0) -> ArchiveEngine:
    """Load an archive directory into an engine snapshot.

    Expected files: manifest.jsonl, global.vecf, optional face.vecf,
    optional gazetteer.tsv and overlay.jsonl.
    """
    root = Path(archive_dir)
    images, statues = read_manifest(root / "manifest.jsonl")
    stores: dict[str, VectorStore] = {}
    for namespace in ("global", "face"):
        path = root / f"{namespace}.vecf"
        if path.exists():
            stores[namespace] = read_vector_store(path)
    gazetteer = None
    gaz_path = root / "gazetteer.tsv"
    if gaz_path.exists():
        gazetteer = Gazetteer.from_file(gaz_path)
    apply_overlay(statues, read_overlay(root / "overlay.jsonl"))
    return ArchiveEngine(images=images, statues=statues, stores=stores,
                         gazetteer=gazetteer, version=version)
