"""Deterministic 2D neighborhood-map layout of embedding sets.

A simplified neighbor-embedding: exact kNN graph, Gaussian edge weights
symmetrized with the probabilistic union, PCA initialization via power
iteration, then epochs of sampled attraction along edges and repulsion
against sampled non-neighbors. Every source of randomness flows from a
single seeded generator, so (inputs, params, seed) fully determine the
layout bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, ParameterError

_GRAD_CLIP = 4.0
_EPS = 1e-3


@dataclass
class MapParams:
    k_neighbors: int = 15
    epochs: int = 200
    negative_samples: int = 5
    learning_rate: float = 1.0
    init: str = "pca"

    def to_dict(self) -> dict:
        return {
            "k_neighbors": self.k_neighbors,
            "epochs": self.epochs,
            "negative_samples": self.negative_samples,
            "learning_rate": self.learning_rate,
            "init": self.init,
        }


@dataclass
class MapLayout:
    ids: list[str]
    coords: np.ndarray                 # (n, 2) float64
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_records(self) -> list[dict]:
        return [{"id": i, "x": float(x), "y": float(y)}
                for i, (x, y) in zip(self.ids, self.coords)]


def _pairwise_knn(x: np.ndarray, k: int, block: int = 2048):
    """Exact Euclidean kNN: (indices, distances), each (n, k)."""
    n = x.shape[0]
    sq = np.einsum("ij,ij->i", x, x)
    idx = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (x[start:stop] @ x.T)
        np.maximum(d2, 0.0, out=d2)
        for local_i in range(stop - start):
            row = d2[local_i]
            i = start + local_i
            row[i] = np.inf
            part = np.argpartition(row, k - 1)[:k]
            order = part[np.lexsort((part, row[part]))]
            idx[i] = order
            dist[i] = np.sqrt(row[order])
    return idx, dist


def _pca_init(x: np.ndarray, seed: int, iters: int = 128) -> np.ndarray:
    """Project onto the top-2 principal components via power iteration."""
    centered = x - x.mean(axis=0)
    rng = np.random.default_rng(seed)
    components = []
    for _ in range(2):
        v = rng.normal(size=centered.shape[1])
        v /= np.linalg.norm(v)
        for _ in range(iters):
            w = centered.T @ (centered @ v)
            for c in components:
                w -= (w @ c) * c
            norm = np.linalg.norm(w)
            if norm < 1e-12:
                break
            v = w / norm
        components.append(v)
    coords = centered @ np.stack(components, axis=1)
    extent = np.abs(coords).max()
    if extent > 0:
        coords = coords * (10.0 / extent)
    return np.ascontiguousarray(coords, dtype=np.float64)


def build_map(vectors: np.ndarray, ids: list[str],
              params: MapParams | None = None, seed: int = 42) -> MapLayout:
    """Lay out high-dimensional vectors on the plane."""
    params = params or MapParams()
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    if n != len(ids):
        raise ValueError("ids/vectors length mismatch")
    if n == 0:
        raise EmptyInputError("cannot lay out an empty vector set")
    if n == 1:
        return MapLayout(ids=list(ids), coords=np.zeros((1, 2)), params=params.to_dict(),
                         seed=seed)

    k = min(params.k_neighbors, n - 1)
    knn_idx, knn_dist = _pairwise_knn(x, k)

    sigma = knn_dist.mean(axis=1)
    sigma[sigma <= 0] = 1e-12
    w_dir = np.exp(-(knn_dist ** 2) / (sigma[:, None] ** 2))

    # symmetrize: w = w_uv + w_vu - w_uv * w_vu over directed kNN weights
    directed: dict[tuple[int, int], float] = {}
    for u in range(n):
        for j in range(k):
            directed[(u, int(knn_idx[u, j]))] = float(w_dir[u, j])
    sym: dict[tuple[int, int], float] = {}
    for (u, v), w_uv in directed.items():
        key = (min(u, v), max(u, v))
        if key in sym:
            continue
        w_vu = directed.get((v, u), 0.0)
        sym[key] = w_uv + w_vu - w_uv * w_vu
    edge_keys = sorted(sym)
    eu = np.array([a for a, _ in edge_keys], dtype=np.int64)
    ev = np.array([b for _, b in edge_keys], dtype=np.int64)
    ew = np.array([sym[kk] for kk in edge_keys], dtype=np.float64)

    # neighbor lookup for negative-sample exclusion
    neighbor_keys = np.sort(np.concatenate([eu * n + ev, ev * n + eu]))

    pos = _pca_init(x, seed)
    rng = np.random.default_rng(seed + 1)
    n_edges = eu.shape[0]
    ns = params.negative_samples
    for epoch in range(params.epochs):
        alpha = params.learning_rate * (1.0 - epoch / params.epochs)
        active = rng.random(n_edges) < ew
        au, av = eu[active], ev[active]
        pu, pv = pos[au], pos[av]
        diff = pu - pv
        d2 = np.einsum("ij,ij->i", diff, diff)
        attract = np.clip((-2.0 / (1.0 + d2))[:, None] * diff,
                          -_GRAD_CLIP, _GRAD_CLIP) * alpha
        # negatives sampled per attracted edge; hits on actual neighbors
        # of u (or u itself) are skipped rather than resampled
        neg = rng.integers(0, n, size=(au.shape[0], ns)) if au.shape[0] else \
            np.zeros((0, ns), dtype=np.int64)
        np.add.at(pos, au, attract)
        np.add.at(pos, av, -attract)
        if au.shape[0]:
            flat_u = np.repeat(au, ns)
            flat_w = neg.ravel()
            keys = flat_u * n + flat_w
            pos_in = np.searchsorted(neighbor_keys, keys)
            pos_in = np.minimum(pos_in, neighbor_keys.size - 1)
            is_neighbor = neighbor_keys[pos_in] == keys if neighbor_keys.size else \
                np.zeros_like(keys, dtype=bool)
            valid = (flat_w != flat_u) & ~is_neighbor
            ru, rw = flat_u[valid], flat_w[valid]
            rdiff = pos[ru] - pos[rw]
            rd2 = np.einsum("ij,ij->i", rdiff, rdiff)
            repel = np.clip((2.0 / ((_EPS + rd2) * (1.0 + rd2)))[:, None] * rdiff,
                            -_GRAD_CLIP, _GRAD_CLIP) * alpha
            np.add.at(pos, ru, repel)

    return MapLayout(ids=list(ids), coords=pos, params=params.to_dict(), seed=seed)


def _rank_table(x: np.ndarray) -> np.ndarray:
    """ranks[i, j] = 1-based rank of j among i's neighbors (self excluded).

    Ties break by ascending index, matching the kNN tie rule.
    """
    n = x.shape[0]
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, np.inf)
    ranks = np.empty((n, n), dtype=np.int64)
    cols = np.arange(n)
    for i in range(n):
        order = np.lexsort((cols, d2[i]))
        ranks[i, order] = np.arange(1, n + 1)
    return ranks


def trustworthiness(high_d: np.ndarray, layout: MapLayout | np.ndarray, k: int) -> float:
    """Neighborhood-preservation score in [0, 1].

    Penalizes points that are 2D k-neighbors but high-D strangers,
    weighted by how far down the high-D ranking they sit.
    """
    low = layout.coords if isinstance(layout, MapLayout) else np.asarray(layout)
    x = np.asarray(high_d, dtype=np.float64)
    n = x.shape[0]
    if low.shape[0] != n:
        raise ValueError("layout/input size mismatch")
    if k >= n:
        raise ParameterError("k must be smaller than the point count")
    high_ranks = _rank_table(x)
    low_ranks = _rank_table(np.asarray(low, dtype=np.float64))
    penalty = 0
    for i in range(n):
        low_nn = np.nonzero(low_ranks[i] <= k)[0]
        for j in low_nn:
            r = high_ranks[i, j]
            if r > k:
                penalty += r - k
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))
