"""Archive curation: near-duplicate removal, capture chains, identity graph.

All neighbor computations in this module are exact. Curation runs once
per archive at desk scale, so correctness (oracle equality) outranks
speed here; the approximate index lives in the search layer only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OverrideError
from .model import ArchiveImage, VectorStore

#: Default thresholds; the source archive gives none, so these are
#: calibration knobs exposed through configuration.
DEFAULT_THETA_DUP = 0.97
DEFAULT_THETA_CHAIN = 0.60
DEFAULT_THETA_LINK = 0.75
DEFAULT_K_LINK = 5


@dataclass(frozen=True)
class DuplicatePair:
    image_id_a: str   # always < image_id_b lexicographically
    image_id_b: str
    similarity: float


@dataclass
class Chain:
    folder_id: str
    image_ids: list[str]


@dataclass(frozen=True)
class GraphEdge:
    u: str
    v: str
    weight: float
    provenance: str  # "chain" | "knn"


@dataclass
class IdentityGraph:
    nodes: list[str]
    edges: list[GraphEdge]

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        return adj


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def groups(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return out


def _similarity_block(store: VectorStore, rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    a = store.matrix[rows_a].astype(np.float64)
    b = store.matrix[rows_b].astype(np.float64)
    return a @ b.T


def pairwise_near_duplicates(store: VectorStore, theta_dup: float,
                             block: int = 1024) -> list[DuplicatePair]:
    """All unordered row pairs with cosine >= theta_dup, exact."""
    if not (0.0 < theta_dup <= 1.0):
        raise ValueError("theta_dup must be in (0, 1]")
    n = store.count
    pairs: list[DuplicatePair] = []
    all_rows = np.arange(n)
    for start in range(0, n, block):
        rows = all_rows[start:start + block]
        sims = _similarity_block(store, rows, all_rows)
        for local_i, i in enumerate(rows):
            js = np.nonzero(sims[local_i, i + 1:] >= theta_dup)[0] + i + 1
            for j in js:
                ida, idb = store.row_ids[i], store.row_ids[int(j)]
                if idb < ida:
                    ida, idb = idb, ida
                pairs.append(DuplicatePair(ida, idb, float(sims[local_i, int(j)])))
    pairs.sort(key=lambda p: (p.image_id_a, p.image_id_b))
    return pairs


def dedup_select(pairs: list[DuplicatePair],
                 images: list[ArchiveImage]) -> tuple[set[str], dict[str, str]]:
    """Pick one survivor per duplicate group.

    Within each connected group of duplicate pairs the lexicographically
    smallest id survives; every other member maps to that survivor.
    Images untouched by any pair survive unconditionally.
    """
    ids = {img.id for img in images}
    uf = _UnionFind(ids | {p.image_id_a for p in pairs} | {p.image_id_b for p in pairs})
    for p in pairs:
        uf.union(p.image_id_a, p.image_id_b)
    duplicate_map: dict[str, str] = {}
    for group in uf.groups().values():
        if len(group) < 2:
            continue
        survivor = min(group)
        for member in group:
            if member != survivor:
                duplicate_map[member] = survivor
    survivors = {i for i in ids if i not in duplicate_map}
    return survivors, duplicate_map


def build_chains(folder_images: list[ArchiveImage], store: VectorStore,
                 theta_chain: float) -> tuple[list[Chain], list[str]]:
    """Partition one folder's images into capture chains.

    Images are ordered by (timestamp, id); a chain breaks wherever the
    cosine similarity of consecutive images drops below theta_chain.
    Images without timestamps sort after timestamped ones, by id alone,
    and the folder is flagged in the returned warnings.
    """
    if not folder_images:
        return [], []
    folder_id = folder_images[0].folder_id
    if any(img.folder_id != folder_id for img in folder_images):
        raise ValueError("build_chains expects images from a single folder")
    warnings: list[str] = []
    if any(img.timestamp is None for img in folder_images):
        warnings.append(f"folder {folder_id}: images without timestamps ordered by id")
    ordered = sorted(
        folder_images,
        key=lambda im: (im.timestamp is None, im.timestamp or 0, im.id),
    )
    chains: list[Chain] = []
    current = [ordered[0]]
    for prev, img in zip(ordered, ordered[1:]):
        sim = float(
            store.matrix[prev.global_row].astype(np.float64)
            @ store.matrix[img.global_row].astype(np.float64)
        )
        if sim >= theta_chain:
            current.append(img)
        else:
            chains.append(Chain(folder_id, [im.id for im in current]))
            current = [img]
    chains.append(Chain(folder_id, [im.id for im in current]))
    return chains, warnings


def build_identity_graph(chains: list[Chain], store: VectorStore, k: int,
                         theta_link: float) -> IdentityGraph:
    """Chain edges plus exact-kNN edges over all chain members.

    kNN edges connect each image to its k nearest neighbors (itself
    excluded) whose cosine reaches theta_link; the graph is undirected.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not (0.0 < theta_link <= 1.0):
        raise ValueError("theta_link must be in (0, 1]")
    node_ids = [iid for chain in chains for iid in chain.image_ids]
    rows = np.array([store.row_of(i) for i in node_ids], dtype=np.int64)
    edges: dict[tuple[str, str], GraphEdge] = {}

    def add_edge(u: str, v: str, weight: float, provenance: str):
        if u == v:
            return
        key = (min(u, v), max(u, v))
        # chain provenance wins when both sources propose the edge
        if key in edges and edges[key].provenance == "chain":
            return
        edges[key] = GraphEdge(key[0], key[1], weight, provenance)

    for chain in chains:
        for a, b in zip(chain.image_ids, chain.image_ids[1:]):
            sim = float(
                store.matrix[store.row_of(a)].astype(np.float64)
                @ store.matrix[store.row_of(b)].astype(np.float64)
            )
            add_edge(a, b, sim, "chain")

    n = len(node_ids)
    if n > 1:
        sub = store.matrix[rows].astype(np.float64)
        block = 1024
        for start in range(0, n, block):
            sims = sub[start:start + block] @ sub.T
            for local_i in range(sims.shape[0]):
                i = start + local_i
                row = sims[local_i].copy()
                row[i] = -np.inf
                kk = min(k, n - 1)
                top = np.argpartition(-row, kk - 1)[:kk]
                # deterministic order: by descending sim then ascending id
                top = sorted(top, key=lambda j: (-row[j], node_ids[j]))
                for j in top:
                    if row[j] >= theta_link:
                        add_edge(node_ids[i], node_ids[j], float(row[j]), "knn")

    edge_list = [edges[k_] for k_ in sorted(edges)]
    return IdentityGraph(nodes=sorted(set(node_ids)), edges=edge_list)


def connected_components(graph: IdentityGraph) -> dict[str, list[str]]:
    """Partition graph nodes into statue clusters.

    Cluster id = "statue:" + smallest member image id.
    """
    adj = graph.adjacency()
    seen: set[str] = set()
    clusters: dict[str, list[str]] = {}
    for node in sorted(adj):
        if node in seen:
            continue
        stack = [node]
        members = []
        seen.add(node)
        while stack:
            cur = stack.pop()
            members.append(cur)
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        members.sort()
        clusters[f"statue:{members[0]}"] = members
    return clusters


@dataclass
class OverrideOp:
    line: int
    kind: str            # "merge" | "split" | "reassign"
    args: tuple


@dataclass
class OverrideScript:
    ops: list[OverrideOp] = field(default_factory=list)


def parse_override_script(text: str) -> OverrideScript:
    """Parse the line-oriented override command file.

    Commands: ``merge <s1> <s2>``, ``split <s> <id,id|id,...>``,
    ``reassign <img> <s>``. ``#`` starts a comment.
    """
    script = OverrideScript()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        cmd = parts[0]
        if cmd == "merge" and len(parts) == 3:
            script.ops.append(OverrideOp(lineno, "merge", (parts[1], parts[2])))
        elif cmd == "split" and len(parts) == 3:
            groups = tuple(tuple(g.split(",")) for g in parts[2].split("|"))
            script.ops.append(OverrideOp(lineno, "split", (parts[1], groups)))
        elif cmd == "reassign" and len(parts) == 3:
            script.ops.append(OverrideOp(lineno, "reassign", (parts[1], parts[2])))
        else:
            raise OverrideError(f"unrecognized command {line!r}", lineno)
    return script


def apply_overrides(clusters: dict[str, list[str]],
                    script: OverrideScript) -> dict[str, list[str]]:
    """Apply manual-annotation operations in order; result stays a partition."""
    state = {sid: list(members) for sid, members in clusters.items()}
    for op in script.ops:
        if op.kind == "merge":
            s1, s2 = op.args
            if s1 not in state:
                raise OverrideError(f"unknown statue {s1}", op.line)
            if s2 not in state:
                raise OverrideError(f"unknown statue {s2}", op.line)
            if s1 == s2:
                continue
            state[s1] = sorted(state[s1] + state.pop(s2))
        elif op.kind == "split":
            sid, groups = op.args
            if sid not in state:
                raise OverrideError(f"unknown statue {sid}", op.line)
            members = set(state[sid])
            listed = [iid for g in groups for iid in g]
            if len(listed) != len(set(listed)):
                raise OverrideError("split groups overlap", op.line)
            if set(listed) != members:
                raise OverrideError(
                    f"split groups must cover statue {sid} exactly", op.line)
            del state[sid]
            for g in groups:
                part = sorted(g)
                state[f"statue:{part[0]}"] = part
        elif op.kind == "reassign":
            img, target = op.args
            if target not in state:
                raise OverrideError(f"unknown statue {target}", op.line)
            source = next((sid for sid, members in state.items() if img in members), None)
            if source is None:
                raise OverrideError(f"unknown image {img}", op.line)
            if source == target:
                continue
            state[source] = [i for i in state[source] if i != img]
            state[target] = sorted(state[target] + [img])
            if not state[source]:
                del state[source]
        else:  # pragma: no cover - parser only emits the three kinds
            raise OverrideError(f"unknown op {op.kind}", op.line)
    return state


def filter_statues(registry: dict[str, list[str]],
                   min_pictures: int) -> tuple[dict[str, list[str]], int]:
    """Keep statues with at least min_pictures images; report coverage."""
    if min_pictures < 1:
        raise ValueError("min_pictures must be >= 1")
    kept = {sid: members for sid, members in registry.items()
            if len(members) >= min_pictures}
    picture_count = sum(len(m) for m in kept.values())
    return kept, picture_count


@dataclass
class CurationResult:
    clusters: dict[str, list[str]]        # statue id -> surviving member image ids
    duplicate_map: dict[str, str]         # removed image id -> survivor id
    chains: list[Chain]
    events: list[dict]                    # JSON-lines stage report


def run_curation(
    images: list[ArchiveImage],
    store: VectorStore,
    *,
    theta_dup: float = DEFAULT_THETA_DUP,
    theta_chain: float = DEFAULT_THETA_CHAIN,
    theta_link: float = DEFAULT_THETA_LINK,
    k: int = DEFAULT_K_LINK,
    overrides: OverrideScript | None = None,
) -> CurationResult:
    """Run the full curation pipeline over embedded images.

    Stages: near-duplicate removal, per-folder chains over survivors,
    chain + kNN identity graph, connected components, manual overrides.
    """
    events: list[dict] = []
    embedded = [img for img in images if img.global_row is not None]
    events.append({"stage": "input", "images": len(images), "embedded": len(embedded)})

    sub = VectorStore(
        store.namespace, store.dim,
        store.matrix[[img.global_row for img in embedded]] if embedded
        else np.zeros((0, store.dim), dtype=np.float32),
        [img.id for img in embedded],
    )
    pairs = pairwise_near_duplicates(sub, theta_dup)
    survivors, duplicate_map = dedup_select(pairs, embedded)
    events.append({"stage": "dedup", "pairs": len(pairs),
                   "removed": len(duplicate_map), "survivors": len(survivors)})

    surviving = [img for img in embedded if img.id in survivors]
    folders: dict[str, list[ArchiveImage]] = {}
    for img in surviving:
        folders.setdefault(img.folder_id, []).append(img)
    chains: list[Chain] = []
    warnings: list[str] = []
    for folder_id in sorted(folders):
        folder_chains, folder_warnings = build_chains(folders[folder_id], store, theta_chain)
        chains.extend(folder_chains)
        warnings.extend(folder_warnings)
    events.append({"stage": "chains", "chains": len(chains), "warnings": warnings})

    graph = build_identity_graph(chains, sub, k, theta_link)
    events.append({"stage": "graph", "nodes": len(graph.nodes), "edges": len(graph.edges)})

    clusters = connected_components(graph)
    events.append({"stage": "components", "statues": len(clusters)})

    if overrides is not None and overrides.ops:
        clusters = apply_overrides(clusters, overrides)
        events.append({"stage": "overrides", "ops": len(overrides.ops),
                       "statues": len(clusters)})

    return CurationResult(clusters=clusters, duplicate_map=duplicate_map,
                          chains=chains, events=events)
