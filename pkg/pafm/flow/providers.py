"""Candidate providers: the ways a pool of plausible targets is assembled for each owner."""
import logging
import math
from typing import Callable, List, Optional

import numpy as np

from pafm.data.knn import KnnIndex, build_knn_index
from pafm.errors import InvalidArgumentError
from pafm.models.dataset import CandidatePool, CandidateTable, Dataset, table_from_pools
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

AugmentFn = Callable[[np.ndarray, int], np.ndarray]


def _index_pool(dataset: Dataset, i: int, indices: np.ndarray) -> CandidatePool:
    indices = np.asarray(indices, dtype=np.int64)
    owner_position = int(np.flatnonzero(indices == i)[0])
    return CandidatePool(i, dataset.points[indices], dataset.labels[indices], indices, owner_position)


def _explicit_pool(dataset: Dataset, i: int, extra: List[np.ndarray]) -> CandidatePool:
    owner = dataset.points[i]
    points = np.vstack([owner[None, :]] + [np.asarray(p, dtype=np.float64)[None, :] for p in extra])
    labels = np.full(points.shape[0], dataset.labels[i], dtype=np.int64)
    indices = np.full(points.shape[0], -1, dtype=np.int64)
    indices[0] = i
    return CandidatePool(i, points, labels, indices, 0)


def provider_full_support(dataset: Dataset, i: int, y_i: int) -> CandidatePool:
    """Every point sharing label ``y_i`` (all points when unconditional)."""
    return _index_pool(dataset, i, dataset.class_indices(y_i))


def provider_knn(dataset: Dataset, index: KnnIndex, i: int, k: int) -> CandidatePool:
    """The K nearest same-class points of ``i``, owner included."""
    size = int(index.class_sizes[i])
    if k < 1 or k > size:
        raise InvalidArgumentError(f"K={k} exceeds the class size {size} of owner {i}")
    if k > index.depth:
        raise InvalidArgumentError(f"K={k} exceeds the precomputed index depth {index.depth}")
    return _index_pool(dataset, i, index.neighbors[i, :k])


def provider_perturbation(dataset: Dataset, i: int, k: int, sigma: float, rng: SeededRng) -> CandidatePool:
    """z^i plus K-1 Gaussian perturbations of scale ``sigma``."""
    if sigma < 0:
        raise InvalidArgumentError(f"sigma must be non-negative, got {sigma}")
    if k < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {k}")
    owner = dataset.points[i]
    noise = rng.normal((k - 1, dataset.d))
    return _explicit_pool(dataset, i, [owner + sigma * noise[m] for m in range(k - 1)])


def provider_augmentation(dataset: Dataset, i: int, k: int, augment_fn: AugmentFn) -> CandidatePool:
    """z^i plus ``augment_fn(z^i, m)`` for m = 1..K-1."""
    if k < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {k}")
    owner = dataset.points[i]
    views = []
    for m in range(1, k):
        view = np.asarray(augment_fn(owner.copy(), m), dtype=np.float64)
        if view.shape != owner.shape:
            raise InvalidArgumentError(f"augmentation returned shape {view.shape}, expected {owner.shape}")
        views.append(view)
    return _explicit_pool(dataset, i, views)


def rotation_augment(centroid: np.ndarray, scale: float, rng: SeededRng) -> AugmentFn:
    """Rotate the first two coordinates about ``centroid`` by U(-scale*pi/8, scale*pi/8)."""
    center = np.asarray(centroid, dtype=np.float64)

    def augment(point: np.ndarray, view: int) -> np.ndarray:
        if point.shape[0] < 2:
            return point.copy()
        angle = (2.0 * rng.uniform(1)[0] - 1.0) * scale * math.pi / 8.0
        c, s = math.cos(angle), math.sin(angle)
        out = point.copy()
        dx, dy = point[0] - center[0], point[1] - center[1]
        out[0] = center[0] + c * dx - s * dy
        out[1] = center[1] + s * dx + c * dy
        return out

    return augment


def cosine_shortlist(embeddings: np.ndarray, i: int, m: int) -> np.ndarray:
    """Indices of the ``m`` embeddings most cosine-similar to embedding ``i`` (owner kept, ties by index)."""
    norms = np.linalg.norm(embeddings, axis=1)
    norms = np.where(norms == 0.0, 1.0, norms)
    sim = (embeddings @ embeddings[i]) / (norms * norms[i])
    sim[i] = np.inf
    order = np.argsort(-sim, kind="stable")
    return np.sort(order[:m])


def provider_shortlist_knn(dataset: Dataset, embeddings: np.ndarray, i: int, m: int, k: int) -> CandidatePool:
    """Two-stage retrieval: cosine shortlist of size M on condition embeddings, then K nearest in latent space."""
    if not 1 <= k <= m <= dataset.n:
        raise InvalidArgumentError(f"need 1 <= K ({k}) <= M ({m}) <= N ({dataset.n})")
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if embeddings.shape[0] != dataset.n:
        raise InvalidArgumentError(f"{embeddings.shape[0]} embeddings for {dataset.n} points")
    shortlist = cosine_shortlist(embeddings, i, m)
    diff = dataset.points[shortlist] - dataset.points[i][None, :]
    dist = np.einsum("md,md->m", diff, diff)
    dist[shortlist == i] = -1.0
    chosen = shortlist[np.argsort(dist, kind="stable")[:k]]
    return _index_pool(dataset, i, chosen)


def build_candidate_table(
    dataset: Dataset,
    provider: str,
    k: int,
    conditioned: bool,
    rng: SeededRng,
    sigma: float = 0.0,
    augment_scale: float = 1.0,
    shortlist_m: int = 128,
    embeddings: Optional[np.ndarray] = None,
    augment_fn: Optional[AugmentFn] = None,
) -> CandidateTable:
    """Pools for every owner from the named provider."""
    pools: List[CandidatePool] = []
    if provider == "full":
        for i in range(dataset.n):
            pools.append(provider_full_support(dataset, i, dataset.conditioning_label(i, conditioned)))
    elif provider == "knn":
        index = build_knn_index(dataset, k, by_class=conditioned)
        for i in range(dataset.n):
            pools.append(provider_knn(dataset, index, i, k))
    elif provider == "perturbation":
        for i in range(dataset.n):
            pools.append(provider_perturbation(dataset, i, k, sigma, rng.derive("candidates", i)))
    elif provider == "augmentation":
        centroid = dataset.points.mean(axis=0)
        for i in range(dataset.n):
            fn = augment_fn or rotation_augment(centroid, augment_scale, rng.derive("candidates", i))
            pools.append(provider_augmentation(dataset, i, k, fn))
    elif provider == "shortlist":
        if embeddings is None:
            # desk-scale stand-in for caption embeddings: one-hot labels plus coordinates
            embeddings = np.hstack([np.eye(dataset.n_classes)[np.searchsorted(dataset.label_set, dataset.labels)], dataset.points])
        for i in range(dataset.n):
            pools.append(provider_shortlist_knn(dataset, embeddings, i, shortlist_m, k))
    else:
        raise InvalidArgumentError(f"unknown candidate provider {provider!r}")
    table = table_from_pools(dataset, pools, uniform_condition=(provider == "shortlist"))
    table.meta.update({"provider": provider, "k": k, "conditioned": conditioned})
    logger.info(f"🎯 Candidate pools ready: provider={provider}, owners={dataset.n}, K_max={table.k_max}")
    return table
