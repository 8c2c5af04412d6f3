"""Exact brute-force nearest neighbours, restricted to points sharing a label.

Neighbour lists put the owner first, then the remaining class members by
ascending squared Euclidean distance with ties broken by ascending dataset
index.
"""
import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy.spatial.distance import cdist

from pafm.errors import InvalidArgumentError
from pafm.models.dataset import UNCONDITIONAL, Dataset

logger = logging.getLogger(__name__)

_CHUNK = 1024


@dataclass(frozen=True)
class KnnIndex:
    """Ordered same-class neighbour lists, truncated to ``depth`` entries."""
    neighbors: np.ndarray      # (N, depth), -1 padded when a class is smaller than depth
    class_sizes: np.ndarray    # (N,) size of each owner's class
    by_class: bool

    @property
    def depth(self) -> int:
        return int(self.neighbors.shape[1])


def _ordered_neighbors(points: np.ndarray, members: np.ndarray, owner_rows: np.ndarray, depth: int) -> np.ndarray:
    dist = cdist(points[members[owner_rows]], points[members], metric="sqeuclidean")
    out = np.empty((owner_rows.shape[0], depth), dtype=np.int64)
    for r, own in enumerate(owner_rows):
        d = dist[r].copy()
        d[own] = -1.0  # owner sorts first even against exact duplicates
        # members are ascending, so a stable sort breaks distance ties by index
        order = np.argsort(d, kind="stable")[:depth]
        out[r] = members[order]
    return out


def build_knn_index(dataset: Dataset, depth: int, by_class: bool = True) -> KnnIndex:
    """Precompute the first ``depth`` neighbours of every point (O(N²) time, chunked memory)."""
    if depth < 1:
        raise InvalidArgumentError(f"kNN depth must be >= 1, got {depth}")
    groups = dataset.label_set if by_class else (UNCONDITIONAL,)
    neighbors = np.full((dataset.n, depth), -1, dtype=np.int64)
    class_sizes = np.zeros(dataset.n, dtype=np.int64)
    for label in groups:
        members = dataset.class_indices(label)
        if members.size == 0:
            continue
        width = min(depth, members.size)
        class_sizes[members] = members.size
        for start in range(0, members.size, _CHUNK):
            rows = np.arange(start, min(start + _CHUNK, members.size))
            neighbors[members[rows], :width] = _ordered_neighbors(dataset.points, members, rows, width)
    logger.debug(f"kNN index built over {dataset.n} points, depth {depth}, by_class={by_class}")
    return KnnIndex(neighbors=neighbors, class_sizes=class_sizes, by_class=by_class)


def precompute_knn(dataset: Dataset, k: int, by_class: bool = True) -> Dict[int, list]:
    """``owner -> [K neighbour indices]`` for every point; the candidates.csv rows."""
    min_class = min(dataset.class_indices(label).size for label in dataset.label_set) if by_class else dataset.n
    if k < 1 or k > min_class:
        raise InvalidArgumentError(f"K={k} must lie in [1, {min_class}] (smallest class size)")
    index = build_knn_index(dataset, k, by_class)
    return {i: index.neighbors[i].tolist() for i in range(dataset.n)}
