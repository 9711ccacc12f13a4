"""Exact k-nearest-neighbor queries with deterministic tie-breaking.

Brute force by design: the datasets this library targets are small
(thousands of rows), and resampling reproducibility hinges on a fully
specified ordering. Candidates are ranked by squared Euclidean distance
with exact distance ties broken by ascending point index.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["NeighborList", "knn", "knn_cross", "order_by_distance"]


@dataclass(frozen=True)
class NeighborList:
    query_index: int
    neighbor_indices: np.ndarray
    distances: np.ndarray


def order_by_distance(points: np.ndarray, query: np.ndarray):
    """(indices sorted by squared distance then index, squared distances)."""
    diff = points - query
    sq = np.einsum("ij,ij->i", diff, diff)
    return np.lexsort((np.arange(len(points)), sq)), sq


def _query(points, query, k, self_index, query_index):
    order, sq = order_by_distance(points, query)
    if self_index is not None:
        order = order[order != self_index]
    take = order[: min(k, len(order))]
    return NeighborList(
        query_index=query_index,
        neighbor_indices=take.astype(np.int64),
        distances=np.sqrt(sq[take]),
    )


def knn(points: np.ndarray, query_row: int, k: int) -> NeighborList:
    """The min(k, n-1) nearest rows to points[query_row], self excluded."""
    points = np.asarray(points, dtype=float)
    if k <= 0:
        raise ValueError("k must be >= 1, got %d" % k)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("points must be a non-empty 2-d matrix")
    if not 0 <= query_row < len(points):
        raise ValueError("query_row %d out of range" % query_row)
    return _query(points, points[query_row], k, query_row, query_row)


def knn_cross(points, queries, k, self_indices=None):
    """Per-query neighbor lists over `points`.

    queries need not come from `points`; a query that happens to be
    bit-identical to some row is still matched to it (distance 0) unless
    the caller names that row in self_indices.
    """
    points = np.asarray(points, dtype=float)
    queries = np.asarray(queries, dtype=float)
    if k <= 0:
        raise ValueError("k must be >= 1, got %d" % k)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("points must be a non-empty 2-d matrix")
    if self_indices is not None and len(self_indices) != len(queries):
        raise ValueError("self_indices must match queries")
    out = []
    for i, q in enumerate(queries):
        self_idx = None if self_indices is None else self_indices[i]
        out.append(_query(points, q, k, self_idx, self_idx if self_idx is not None else i))
    return out
