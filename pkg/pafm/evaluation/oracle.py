"""Analytic marginal velocity of a finite dataset.

For an empirical target distribution the marginal field at (z_t, t) is the
posterior-weighted mean of the conditional velocities (z_t - z^j)/t, with
posterior weights proportional to the conditional path likelihoods.
"""
from typing import Callable, Optional

import numpy as np

from pafm.errors import DegenerateTimeError, InvalidArgumentError
from pafm.flow.path import DEFAULT_T_EPS, batch_log_path_likelihood
from pafm.models.dataset import UNCONDITIONAL, Dataset
from pafm.utils.numeric import log_normalize

VelocityField = Callable[[np.ndarray, np.ndarray, Optional[np.ndarray]], np.ndarray]

_CHUNK = 2048


def _oracle_block(points: np.ndarray, z_t: np.ndarray, t: np.ndarray, mean, std) -> np.ndarray:
    log_w = batch_log_path_likelihood(z_t, points, t, mean, std)          # (B, N)
    weights = log_normalize(log_w, axis=1)
    # sum_j w_j (z_t - z^j) / t = (z_t - sum_j w_j z^j) / t
    return (z_t - weights @ points) / t[:, None]


def oracle_batch(
    dataset: Dataset,
    z_t: np.ndarray,
    t: np.ndarray,
    y: Optional[np.ndarray] = None,
    t_eps: float = DEFAULT_T_EPS,
) -> np.ndarray:
    """Marginal velocity at many (z_t, t[, y]) at once; y=None or UNCONDITIONAL uses every point."""
    z_t = np.asarray(z_t, dtype=np.float64)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), (z_t.shape[0],))
    if np.any(t < t_eps):
        raise DegenerateTimeError(f"oracle needs t >= t_eps ({t_eps})")
    if np.any(t > 1.0):
        raise InvalidArgumentError("oracle needs t <= 1")
    labels = np.full(z_t.shape[0], UNCONDITIONAL) if y is None else np.broadcast_to(np.asarray(y), (z_t.shape[0],))
    out = np.empty_like(z_t)
    for label in np.unique(labels):
        rows = np.flatnonzero(labels == label)
        points = dataset.points[dataset.class_indices(int(label))]
        if points.shape[0] == 0:
            raise InvalidArgumentError(f"no dataset points with label {label}")
        for start in range(0, rows.size, _CHUNK):
            r = rows[start:start + _CHUNK]
            out[r] = _oracle_block(points, z_t[r], t[r], dataset.source_mean, dataset.source_std)
    return out


def marginal_velocity_oracle(dataset: Dataset, z_t, t: float, y: int = UNCONDITIONAL, t_eps: float = DEFAULT_T_EPS) -> np.ndarray:
    z = np.asarray(z_t, dtype=np.float64)
    if z.shape != (dataset.d,):
        raise InvalidArgumentError(f"z_t has shape {z.shape}, expected ({dataset.d},)")
    return oracle_batch(dataset, z[None, :], np.array([float(t)]), np.array([y]), t_eps)[0]


def oracle_field(dataset: Dataset, t_eps: float = DEFAULT_T_EPS) -> VelocityField:
    """The oracle as a velocity field callable, usable wherever a trained model is."""
    def field(z_t: np.ndarray, t: np.ndarray, y: Optional[np.ndarray] = None) -> np.ndarray:
        return oracle_batch(dataset, z_t, np.maximum(t, t_eps), y, t_eps)
    return field
