"""Synthetic target distributions: two interleaved crescents and Gaussian mixtures."""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from pafm.errors import InvalidArgumentError
from pafm.models.dataset import Dataset
from pafm.schemas.dataset import DatasetFamily, SyntheticSpec
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

DEFAULT_SOURCE_MEAN = (0.0, 3.0)
DEFAULT_SOURCE_STD = 0.1


def moon_point(moon: int, theta) -> np.ndarray:
    """Noise-free crescent coordinates: upper arc for moon 0, shifted and reflected arc for moon 1.

    ``theta`` may be a scalar or an array; the result has a trailing axis of size 2.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if moon == 0:
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return np.stack([1.0 - np.cos(theta), 0.5 - np.sin(theta)], axis=-1)


def gen_two_moons(
    n_per_class: int,
    noise_std: float,
    rng: SeededRng,
    source_mean: Sequence[float] = DEFAULT_SOURCE_MEAN,
    source_std: float = DEFAULT_SOURCE_STD,
) -> Dataset:
    if n_per_class < 1:
        raise InvalidArgumentError(f"n_per_class must be >= 1, got {n_per_class}")
    if noise_std < 0:
        raise InvalidArgumentError(f"noise_std must be non-negative, got {noise_std}")
    theta = math.pi * rng.uniform((2, n_per_class))
    points = np.vstack([moon_point(0, theta[0]), moon_point(1, theta[1])])
    if noise_std > 0:
        points = points + noise_std * rng.normal(points.shape)
    labels = np.repeat(np.arange(2, dtype=np.int64), n_per_class)
    return Dataset(points, labels, (0, 1), np.asarray(source_mean, dtype=np.float64), source_std)


def gen_gaussian_mixture(
    centers: Sequence[Sequence[float]],
    stds: Sequence[float],
    n_per_center: int,
    rng: SeededRng,
    source_mean: Optional[Sequence[float]] = None,
    source_std: float = 1.0,
) -> Dataset:
    centers_arr = np.asarray(centers, dtype=np.float64)
    if centers_arr.ndim != 2 or centers_arr.shape[0] != len(stds) or centers_arr.shape[0] < 1:
        raise InvalidArgumentError("centers and stds must be conformant and non-empty")
    if n_per_center < 1:
        raise InvalidArgumentError(f"n_per_center must be >= 1, got {n_per_center}")
    d = centers_arr.shape[1]
    blocks = []
    for c, std in enumerate(stds):
        if std < 0:
            raise InvalidArgumentError(f"std of center {c} is negative")
        blocks.append(centers_arr[c][None, :] + std * rng.normal((n_per_center, d)))
    labels = np.repeat(np.arange(len(stds), dtype=np.int64), n_per_center)
    mean = np.zeros(d) if source_mean is None else np.asarray(source_mean, dtype=np.float64)
    return Dataset(np.vstack(blocks), labels, tuple(range(len(stds))), mean, source_std)


def subsample(dataset: Dataset, n_total: int, rng: SeededRng) -> Dataset:
    """Class-balanced uniform subsample without replacement; original order kept."""
    if n_total < 1 or n_total > dataset.n:
        raise InvalidArgumentError(f"cannot subsample {n_total} of {dataset.n} points")
    if n_total == dataset.n:
        return dataset
    groups = [dataset.class_indices(label) for label in dataset.label_set]
    quotas = [0] * len(groups)
    remaining = n_total
    open_groups = [g for g in range(len(groups)) if groups[g].size > 0]
    while remaining > 0 and open_groups:
        share, extra = divmod(remaining, len(open_groups))
        for rank, g in enumerate(list(open_groups)):
            want = share + (1 if rank < extra else 0)
            take = min(want, groups[g].size - quotas[g])
            quotas[g] += take
            remaining -= take
        open_groups = [g for g in open_groups if quotas[g] < groups[g].size]
    chosen = np.sort(np.concatenate([
        rng.choice_without_replacement(groups[g], quotas[g]) for g in range(len(groups))
    ]))
    return Dataset(dataset.points[chosen], dataset.labels[chosen], dataset.label_set,
                   dataset.source_mean, dataset.source_std)


def make_dataset(spec: SyntheticSpec, rng: Optional[SeededRng] = None) -> Dataset:
    """Generate (and optionally subsample) the dataset a SyntheticSpec describes."""
    seed = 0 if spec.seed is None else spec.seed
    rng = rng or SeededRng(seed, "data")
    if spec.family == DatasetFamily.two_moons:
        dataset = gen_two_moons(spec.n_per_class, spec.noise_std, rng, spec.source_mean, spec.source_std)
    else:
        dataset = gen_gaussian_mixture(spec.centers, spec.center_stds, spec.n_per_class, rng,
                                       spec.source_mean, spec.source_std)
    if spec.n_total is not None:
        dataset = subsample(dataset, spec.n_total, rng.derive("subsample"))
    logger.info(f"📦 Generated {spec.family.value} dataset: n={dataset.n}, d={dataset.d}, classes={dataset.n_classes}")
    return dataset
