"""Vector search: exact flat scan and a layered proximity-graph index.

The flat scan is the semantic ground truth; the graph index trades
exactness for speed at larger scales. Both rank by cosine similarity
(dot product of unit vectors) with ties broken by ascending row id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .model import VectorStore
from .textindex import QueryResult


def _rank_results(store: VectorStore, sims: np.ndarray, candidates: np.ndarray,
                  k: int) -> list[QueryResult]:
    """Top-k of the candidate rows by (descending sim, ascending id)."""
    if candidates.size == 0:
        return []
    kk = min(k, candidates.size)
    cand_sims = sims[candidates]
    if candidates.size > kk * 4:
        # shrink with argpartition first; keep extras to resolve ties by id
        keep = min(candidates.size, kk * 4)
        part = np.argpartition(-cand_sims, keep - 1)[:keep]
        candidates = candidates[part]
        cand_sims = cand_sims[part]
    order = sorted(range(candidates.size),
                   key=lambda i: (-cand_sims[i], store.row_ids[candidates[i]]))[:kk]
    return [
        QueryResult(entity_id=store.row_ids[candidates[i]],
                    score=float(cand_sims[i]), rank=r)
        for r, i in enumerate(order, start=1)
    ]


class FlatIndex:
    """Exact cosine top-k over a vector store."""

    def __init__(self, store: VectorStore):
        self.store = store

    def _similarities(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64).ravel()
        if q.shape[0] != self.store.dim:
            raise DimensionError(
                f"query dim {q.shape[0]} != store dim {self.store.dim}")
        return self.store.matrix @ q  # float32 @ float64 -> float64 accumulation

    def knn_exact(self, q: np.ndarray, k: int,
                  exclude: set[str] | None = None) -> list[QueryResult]:
        if k < 1:
            raise ParameterError("k must be >= 1")
        sims = self._similarities(q)
        candidates = np.arange(self.store.count)
        if exclude:
            mask = np.array([rid not in exclude for rid in self.store.row_ids])
            candidates = candidates[mask]
        return _rank_results(self.store, sims, candidates, k)

    def filtered_knn(self, q: np.ndarray, k: int, predicate) -> list[QueryResult]:
        """Exact top-k among rows whose id satisfies the predicate.

        Semantics are identical to filtering the store first and then
        running knn_exact.
        """
        if k < 1:
            raise ParameterError("k must be >= 1")
        sims = self._similarities(q)
        mask = np.array([bool(predicate(rid)) for rid in self.store.row_ids], dtype=bool)
        candidates = np.nonzero(mask)[0]
        return _rank_results(self.store, sims, candidates, k)


@dataclass
class ProximityGraphIndex:
    """Layered navigable small-world graph over store rows.

    Built greedily: each node enters at a geometrically distributed
    level; neighbors per node are capped at M per layer (2M on the base
    layer). Deterministic for a fixed seed.
    """

    store: VectorStore
    M: int
    ef_construction: int
    seed: int
    entry_point: int = -1
    max_level: int = -1
    layers: list[list[list[int]]] = field(default_factory=list)  # layers[l][node] -> neighbor rows

    def neighbors(self, layer: int, node: int) -> list[int]:
        return self.layers[layer][node]


def _search_layer(index: ProximityGraphIndex, q: np.ndarray, entry: list[int],
                  ef: int, layer: int) -> list[tuple[float, int]]:
    """Best-first search on one layer; returns up to ef (sim, node) pairs."""
    import heapq

    mat = index.store.matrix
    visited = set(entry)
    sims = {e: float(mat[e] @ q) for e in entry}
    # candidates: max-heap by sim; results: min-heap by sim
    candidates = [(-sims[e], e) for e in entry]
    heapq.heapify(candidates)
    results = [(sims[e], e) for e in entry]
    heapq.heapify(results)
    while len(results) > ef:
        heapq.heappop(results)
    while candidates:
        neg_sim, node = heapq.heappop(candidates)
        if results and -neg_sim < results[0][0] and len(results) >= ef:
            break
        fresh = [n for n in index.layers[layer][node] if n not in visited]
        if not fresh:
            continue
        visited.update(fresh)
        batch = mat[fresh] @ q
        for n, s in zip(fresh, batch):
            s = float(s)
            if len(results) < ef or s > results[0][0]:
                heapq.heappush(candidates, (-s, n))
                heapq.heappush(results, (s, n))
                if len(results) > ef:
                    heapq.heappop(results)
    return sorted(results, reverse=True)


def _select_diverse(mat: np.ndarray, candidates: list[tuple[float, int]],
                    cap: int) -> list[int]:
    """Diversified neighbor selection: a candidate is kept only when it is
    closer to the query than to every neighbor already kept, which spreads
    links across directions instead of piling them onto hubs."""
    if not candidates:
        return []
    nodes = [n for _, n in candidates]
    sims_q = np.array([s for s, _ in candidates])
    cross = (mat[nodes].astype(np.float64) @ mat[nodes].astype(np.float64).T)
    selected: list[int] = []
    skipped: list[int] = []
    for i in range(len(nodes)):
        if len(selected) >= cap:
            break
        if all(cross[i, j] <= sims_q[i] for j in selected):
            selected.append(i)
        else:
            skipped.append(i)
    # backfill with the strongest pruned candidates to keep the graph dense
    selected.extend(skipped[: cap - len(selected)])
    return [nodes[i] for i in selected]


def build_ann(store: VectorStore, M: int = 16, ef_construction: int = 200,
              seed: int = 42) -> ProximityGraphIndex:
    """Insert all store rows into a fresh proximity graph."""
    if M < 2:
        raise ParameterError("M must be >= 2")
    if ef_construction < 1:
        raise ParameterError("ef_construction must be >= 1")
    index = ProximityGraphIndex(store=store, M=M, ef_construction=ef_construction,
                                seed=seed)
    n = store.count
    if n == 0:
        return index
    rng = np.random.default_rng(seed)
    ml = 1.0 / math.log(M)
    levels = np.floor(-np.log(rng.random(n)) * ml).astype(int)
    mat = store.matrix

    for node in range(n):
        level = int(levels[node])
        if index.entry_point < 0:
            # first node seeds every one of its layers
            for _ in range(level + 1):
                index.layers.append([[] for _ in range(n)])
            index.entry_point = node
            index.max_level = level
            continue
        while len(index.layers) <= level:
            index.layers.append([[] for _ in range(n)])
        q = mat[node].astype(np.float64)
        entry = [index.entry_point]
        # greedy descent through layers above the node's level
        for layer in range(index.max_level, level, -1):
            entry = [_search_layer(index, q, entry, 1, layer)[0][1]]
        for layer in range(min(level, index.max_level), -1, -1):
            found = _search_layer(index, q, entry, ef_construction, layer)
            cap = M if layer > 0 else 2 * M
            chosen = _select_diverse(mat, found, cap)
            index.layers[layer][node] = chosen
            for other in chosen:
                links = index.layers[layer][other]
                links.append(node)
                if len(links) > cap:
                    link_sims = mat[links] @ mat[other].astype(np.float64)
                    order = np.argsort(-link_sims, kind="stable")
                    ranked = [(float(link_sims[i]), links[i]) for i in order]
                    index.layers[layer][other] = _select_diverse(mat, ranked, cap)
            entry = [node_id for _, node_id in found]
        if level > index.max_level:
            index.max_level = level
            index.entry_point = node
    return index


def knn_ann(index: ProximityGraphIndex, q: np.ndarray, k: int,
            ef_search: int = 64) -> list[QueryResult]:
    """Approximate top-k via greedy descent plus base-layer beam search."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    if ef_search < k:
        raise ParameterError(f"ef_search ({ef_search}) must be >= k ({k})")
    store = index.store
    q = np.asarray(q, dtype=np.float64).ravel()
    if q.shape[0] != store.dim:
        raise DimensionError(f"query dim {q.shape[0]} != store dim {store.dim}")
    if store.count == 0 or index.entry_point < 0:
        return []
    entry = [index.entry_point]
    for layer in range(index.max_level, 0, -1):
        entry = [_search_layer(index, q, entry, 1, layer)[0][1]]
    found = _search_layer(index, q, entry, ef_search, 0)
    rows = np.array([node for _, node in found], dtype=np.int64)
    sims = store.matrix @ q
    return _rank_results(store, sims, rows, k)


def base_layer_reachable(index: ProximityGraphIndex) -> bool:
    """True when every node is reachable from the entry point on layer 0."""
    if index.store.count == 0:
        return True
    seen = {index.entry_point}
    stack = [index.entry_point]
    while stack:
        node = stack.pop()
        for nxt in index.layers[0][node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == index.store.count
