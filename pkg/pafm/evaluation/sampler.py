"""First-order Euler integration of a velocity field from noise (t=1) to data (t=0)."""
import logging
from typing import Optional, Union

import numpy as np

from pafm.errors import InvalidArgumentError, NumericFailureError
from pafm.evaluation.field import as_field
from pafm.evaluation.oracle import VelocityField
from pafm.models.dataset import UNCONDITIONAL
from pafm.models.mlp import MlpModel
from pafm.utils.rng import SeededRng, gaussian_batch

logger = logging.getLogger(__name__)


def euler_sample(
    source: Union[MlpModel, VelocityField],
    n_samples: int,
    n_steps: int,
    rng: SeededRng,
    source_mean: np.ndarray,
    source_std: float,
    y: int = UNCONDITIONAL,
    initial: Optional[np.ndarray] = None,
) -> np.ndarray:
    """z <- z - dt * f(z | t, y) for t = 1, 1 - dt, ..., dt; returns z(0) per sample."""
    if n_steps < 1:
        raise InvalidArgumentError(f"n_steps must be >= 1, got {n_steps}")
    field = as_field(source)
    z = gaussian_batch(rng, n_samples, source_mean, source_std) if initial is None else np.array(initial, dtype=np.float64)
    labels = np.full(z.shape[0], y, dtype=np.int64)
    dt = 1.0 / n_steps
    for k in range(n_steps):
        t = np.full(z.shape[0], 1.0 - k * dt)
        z = z - dt * field(z, t, labels)
        if not np.all(np.isfinite(z)):
            raise NumericFailureError(f"non-finite sample during Euler step {k}", index=k)
    return z
