"""Grouping hail events into storms.

Single-linkage agglomerative clustering, computed as the minimum spanning
tree of the complete Euclidean distance graph with edges replayed in
ascending order (the two are equivalent). The dendrogram is cut where the
merge height jumps disproportionately relative to the previous merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .events import HailEvent

__all__ = [
    "Dendrogram",
    "ClusterCut",
    "event_features",
    "single_linkage",
    "cut_dendrogram",
]

DEFAULT_JUMP_THRESHOLD = 3.0
DEFAULT_MIN_PREV_HEIGHT = 1e-12


@dataclass(frozen=True)
class Dendrogram:
    """Sequence of single-linkage merges.

    Leaves are numbered 0..leaf_count-1; the k-th merge creates cluster id
    leaf_count + k from two existing cluster ids at the given height.
    Heights are nondecreasing.
    """

    merges: tuple[tuple[int, int, float], ...]
    leaf_count: int


@dataclass(frozen=True)
class ClusterCut:
    """Flat clustering obtained by cutting a dendrogram.

    ``assignments[i]`` is the storm label of event i; labels are contiguous
    and ordered by first event occurrence. ``jump_ratio`` is the height
    ratio that triggered the cut (1.0 when no jump was found).
    """

    assignments: tuple[int, ...]
    cluster_count: int
    jump_ratio: float


def event_features(events: list[HailEvent], time_scale: float = 0.0) -> np.ndarray:
    """Feature matrix for clustering: (lon, lat) plus optionally scaled time.

    With time_scale > 0 a third column holds time_scale * seconds since the
    first event in the list.
    """
    if not events:
        raise ValueError("event_features: no events")
    if time_scale < 0.0:
        raise ValueError(f"event_features: time_scale must be >= 0, got {time_scale}")
    coords = np.array([[e.lon, e.lat] for e in events])
    if time_scale == 0.0:
        return coords
    t0 = events[0].time
    dt = np.array([(e.time - t0).total_seconds() for e in events])
    return np.column_stack([coords, time_scale * dt])


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        self.parent[self.find(i)] = self.find(j)


def _mst_edges(features: np.ndarray) -> list[tuple[float, int, int]]:
    """Prim's algorithm on the complete Euclidean graph; O(n^2).

    Returns (distance, i, j) edges with i < j; ties during growth resolve
    to the smallest vertex index.
    """
    n = len(features)
    in_tree = np.zeros(n, dtype=bool)
    best_from = np.zeros(n, dtype=int)
    in_tree[0] = True
    diff = features - features[0]
    best_dist = np.sqrt(np.sum(diff * diff, axis=1))
    best_dist[0] = np.inf
    edges: list[tuple[float, int, int]] = []
    for _ in range(n - 1):
        k = int(np.argmin(best_dist))  # argmin takes the first minimum: smallest index wins ties
        i, j = best_from[k], k
        edges.append((float(best_dist[k]), min(i, j), max(i, j)))
        in_tree[k] = True
        best_dist[k] = np.inf
        diff = features - features[k]
        dist_k = np.sqrt(np.sum(diff * diff, axis=1))
        closer = ~in_tree & (dist_k < best_dist)
        best_dist[closer] = dist_k[closer]
        best_from[closer] = k
    return edges


def single_linkage(features: np.ndarray) -> Dendrogram:
    """Single-linkage dendrogram of the rows of ``features``.

    Merge heights equal the MST edge weights in ascending order; exact ties
    break on the smallest (leaf, leaf) pair so the result is deterministic.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    if features.ndim != 2:
        raise ValueError(f"single_linkage: expected a 2-D feature matrix, got shape {features.shape}")
    n = len(features)
    if n == 0:
        raise ValueError("single_linkage: no feature vectors")
    if n == 1:
        return Dendrogram(merges=(), leaf_count=1)
    edges = sorted(_mst_edges(features))
    uf = _UnionFind(n)
    cluster_id = list(range(n))
    merges: list[tuple[int, int, float]] = []
    next_id = n
    for dist, i, j in edges:
        ri, rj = uf.find(i), uf.find(j)
        ida, idb = cluster_id[ri], cluster_id[rj]
        uf.union(ri, rj)
        cluster_id[uf.find(ri)] = next_id
        merges.append((min(ida, idb), max(ida, idb), dist))
        next_id += 1
    return Dendrogram(merges=tuple(merges), leaf_count=n)


def cut_dendrogram(dendrogram: Dendrogram,
                   jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
                   min_prev_height: float = DEFAULT_MIN_PREV_HEIGHT) -> ClusterCut:
    """Cut before the first merge whose height jumps past the previous one.

    A merge at height h cuts the tree when h > jump_threshold * h_prev,
    where h_prev is the preceding merge height. Merges whose predecessor
    height is at most ``min_prev_height`` (duplicate points) cannot define
    a jump and are skipped. Without a jump everything is one cluster.
    """
    if jump_threshold <= 1.0:
        raise ValueError(f"cut_dendrogram: jump_threshold must be > 1, got {jump_threshold}")
    heights = [m[2] for m in dendrogram.merges]
    cut_index = len(heights)
    jump_ratio = 1.0
    for k in range(1, len(heights)):
        prev = heights[k - 1]
        if prev <= min_prev_height:
            continue
        if heights[k] > jump_threshold * prev:
            cut_index = k
            jump_ratio = heights[k] / prev
            break
    n = dendrogram.leaf_count
    uf = _UnionFind(n)
    rep: dict[int, int] = {i: i for i in range(n)}  # cluster id -> a representative leaf
    next_id = n
    for ida, idb, _h in dendrogram.merges[:cut_index]:
        uf.union(rep[ida], rep[idb])
        rep[next_id] = uf.find(rep[ida])
        next_id += 1
    labels: dict[int, int] = {}
    assignments = []
    for i in range(n):
        root = uf.find(i)
        if root not in labels:
            labels[root] = len(labels)
        assignments.append(labels[root])
    return ClusterCut(assignments=tuple(assignments),
                      cluster_count=len(labels),
                      jump_ratio=jump_ratio)
