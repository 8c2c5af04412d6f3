"""Linear interpolant z_t = t*eps + (1-t)*z and its conditional quantities.

Time runs from data (t=0) to noise (t=1). With a source N(mu, s² I) the
conditional path is the Gaussian N(t*mu + (1-t) z, t² s² I); the standard
source (mu=0, s=1) gives N((1-t) z, t² I). Only the unnormalized log density
is used because candidate weights depend on likelihood ratios alone.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pafm.errors import DegenerateTimeError, InvalidArgumentError
from pafm.utils.numeric import as_point, same_dimension, squared_norms

# Below this t the posterior over candidates is treated as a point mass on the
# generating datum and the target short-circuits to eps - z.
DEFAULT_T_EPS = 1e-4


@dataclass(frozen=True)
class PathPoint:
    z_t: np.ndarray
    t: float
    eps: np.ndarray
    data_index: int


def _check_time(t: float) -> float:
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise InvalidArgumentError(f"t must lie in [0, 1), got {t}")
    return t


def interpolate(z, eps, t: float) -> np.ndarray:
    t = _check_time(t)
    z = as_point(z, name="z")
    eps = as_point(eps, d=z.shape[0], name="eps")
    return t * eps + (1.0 - t) * z


def make_path_point(z, eps, t: float, data_index: int) -> PathPoint:
    z_t = interpolate(z, eps, t)
    return PathPoint(z_t=z_t, t=float(t), eps=np.asarray(eps, dtype=np.float64), data_index=int(data_index))


def conditional_velocity(z_t, z_target, t: float, t_eps: float = DEFAULT_T_EPS) -> np.ndarray:
    """(z_t - z_target) / t. Callers handle t <= t_eps through the eps - z identity."""
    t = float(t)
    if t <= t_eps:
        raise DegenerateTimeError(f"conditional velocity undefined at t={t} (t_eps={t_eps})")
    z_t = np.asarray(z_t, dtype=np.float64)
    z_target = np.asarray(z_target, dtype=np.float64)
    same_dimension(z_t, z_target, "conditional_velocity")
    return (z_t - z_target) / t


def log_path_likelihood(
    z_t,
    z_target,
    t: float,
    source_mean: Optional[np.ndarray] = None,
    source_std: float = 1.0,
) -> float:
    """-||z_t - t*mu - (1-t) z_target||² / (2 t² s²), the normalizing constant dropped."""
    t = float(t)
    if t <= 0.0:
        raise DegenerateTimeError("path likelihood is a Dirac mass at t=0")
    if t > 1.0:
        raise InvalidArgumentError(f"t must lie in (0, 1], got {t}")
    z_t = np.asarray(z_t, dtype=np.float64)
    z_target = np.asarray(z_target, dtype=np.float64)
    same_dimension(z_t, z_target, "log_path_likelihood")
    diff = z_t - (1.0 - t) * z_target
    if source_mean is not None:
        diff = diff - t * np.asarray(source_mean, dtype=np.float64)
    scale = t * source_std
    return float(-(diff @ diff) / (2.0 * scale * scale))


def batch_log_path_likelihood(
    z_t: np.ndarray,
    targets: np.ndarray,
    t: np.ndarray,
    source_mean: Optional[np.ndarray] = None,
    source_std: float = 1.0,
) -> np.ndarray:
    """Vectorized log likelihood.

    z_t: (B, d), targets: (B, K, d) or (K, d), t: (B,) with every t > 0.
    Returns (B, K).
    """
    center = z_t
    if source_mean is not None:
        center = z_t - t[:, None] * np.asarray(source_mean, dtype=np.float64)[None, :]
    scale = (1.0 - t)[:, None, None]
    if targets.ndim == 2:
        diff = center[:, None, :] - scale * targets[None, :, :]
    else:
        diff = center[:, None, :] - scale * targets
    sigma = t * source_std
    return -squared_norms(diff) / (2.0 * sigma * sigma)[:, None]
