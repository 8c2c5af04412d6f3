"""Sample-set statistics: Gaussian KDE, energy distance and nearest-neighbour distances."""
import math
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from pafm.errors import InvalidArgumentError

_CHUNK = 1024


def scott_bandwidth(points: np.ndarray) -> float:
    """n^(-1/(d+4)) times the mean per-coordinate standard deviation."""
    points = np.asarray(points, dtype=np.float64)
    n, d = points.shape
    sigma = float(np.mean(np.std(points, axis=0, ddof=1))) if n > 1 else 1.0
    return (sigma if sigma > 0 else 1.0) * n ** (-1.0 / (d + 4))


def kde_many(points: np.ndarray, queries: np.ndarray, bandwidth: Optional[float] = None) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if points.shape[0] == 0:
        raise InvalidArgumentError("KDE needs at least one point")
    h = scott_bandwidth(points) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise InvalidArgumentError(f"bandwidth must be positive, got {h}")
    d = points.shape[1]
    norm = (2.0 * math.pi * h * h) ** (-d / 2.0)
    out = np.empty(queries.shape[0])
    for start in range(0, queries.shape[0], _CHUNK):
        sq = cdist(queries[start:start + _CHUNK], points, metric="sqeuclidean")
        out[start:start + _CHUNK] = norm * np.mean(np.exp(-sq / (2.0 * h * h)), axis=1)
    return out


def kde(points: np.ndarray, query, bandwidth: Optional[float] = None) -> float:
    """(1/n) sum_i N(query; p_i, h² I)."""
    return float(kde_many(points, np.asarray(query, dtype=np.float64)[None, :], bandwidth)[0])


def _mean_distance(a: np.ndarray, b: np.ndarray) -> float:
    total = 0.0
    for start in range(0, a.shape[0], _CHUNK):
        total += float(np.sum(cdist(a[start:start + _CHUNK], b)))
    return total / (a.shape[0] * b.shape[0])


def energy_distance(samples_a: np.ndarray, samples_b: np.ndarray) -> float:
    """2 E||a - b|| - E||a - a'|| - E||b - b'|| with all-pairs averages."""
    a = np.asarray(samples_a, dtype=np.float64)
    b = np.asarray(samples_b, dtype=np.float64)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise InvalidArgumentError("energy distance needs two non-empty sample sets")
    # averaging both orientations keeps the result exactly symmetric
    cross = 0.5 * (_mean_distance(a, b) + _mean_distance(b, a))
    return 2.0 * cross - (_mean_distance(a, a) + _mean_distance(b, b))


def mean_nearest_distance(points: np.ndarray, reference: np.ndarray) -> float:
    """Mean distance from each point to its nearest reference point."""
    dist, _ = cKDTree(reference).query(points, k=1)
    return float(np.mean(dist))


def mean_nn_spacing(points: np.ndarray) -> float:
    """Mean distance from each point to its nearest other point in the same set."""
    dist, _ = cKDTree(points).query(points, k=2)
    return float(np.mean(dist[:, 1]))


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over up to ``window`` entries (shorter at the start)."""
    values = np.asarray(values, dtype=np.float64)
    if window < 1:
        raise InvalidArgumentError(f"window must be >= 1, got {window}")
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(1, values.size + 1)
    lo = np.maximum(idx - window, 0)
    return (csum[idx] - csum[lo]) / (idx - lo)
