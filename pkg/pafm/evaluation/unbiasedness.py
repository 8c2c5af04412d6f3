"""Monte-Carlo check that the posterior-resampled loss has the same mean as the FM loss.

On a small dataset the posterior over targets given (z_t, y) can be
enumerated exactly, so a target z' can be resampled from it directly. The FM
loss ||f - (eps - z)||² and the resampled loss ||f - (z_t - z')/t||² are then
two estimators of one expectation.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from pafm.errors import InvalidArgumentError
from pafm.flow.path import DEFAULT_T_EPS, batch_log_path_likelihood
from pafm.models.dataset import Dataset
from pafm.models.mlp import MlpModel, forward_batch
from pafm.utils.numeric import log_normalize
from pafm.utils.rng import SeededRng, gaussian_batch

logger = logging.getLogger(__name__)

MAX_ENUMERATED = 16
_CHUNK = 16384


@dataclass(frozen=True)
class UnbiasednessResult:
    fm_mean: float
    pafm_mean: float
    fm_stderr: float
    pafm_stderr: float
    paired_stderr: float
    n_draws: int

    @property
    def difference(self) -> float:
        return self.fm_mean - self.pafm_mean

    @property
    def independent_stderr(self) -> float:
        """Standard error of the difference if the two means came from separate draws."""
        return math.hypot(self.fm_stderr, self.pafm_stderr)

    @property
    def z_score(self) -> float:
        """|fm - pafm| over the standard error of the per-draw difference."""
        if self.paired_stderr > 0:
            return abs(self.difference) / self.paired_stderr
        return 0.0 if self.difference == 0 else math.inf


class _Moments:
    def __init__(self):
        self.n = 0
        self.total = 0.0
        self.total_sq = 0.0

    def add(self, values: np.ndarray) -> None:
        self.n += values.size
        self.total += float(np.sum(values))
        self.total_sq += float(np.sum(values * values))

    def mean_stderr(self):
        mean = self.total / self.n
        var = max(self.total_sq / self.n - mean * mean, 0.0) * self.n / max(self.n - 1, 1)
        return mean, math.sqrt(var / self.n)


def _draw(dataset: Dataset, rng: SeededRng, n: int):
    owners = rng.integers(dataset.n, n)
    eps = gaussian_batch(rng, n, dataset.source_mean, dataset.source_std)
    t = rng.uniform(n)
    z = dataset.points[owners]
    z_t = t[:, None] * eps + (1.0 - t)[:, None] * z
    return owners, eps, t, z, z_t


def _predict(model: MlpModel, dataset: Dataset, z_t, t, owners, conditioned):
    y = dataset.labels[owners] if (conditioned and model.conditioned) else None
    return forward_batch(model, z_t, t, y)


def posterior_resample(dataset: Dataset, owners, z_t, t, u, conditioned: bool, t_eps: float) -> np.ndarray:
    """Exact posterior draw of a target index per row via inverse CDF on uniforms ``u``."""
    safe_t = np.where(t < t_eps, 1.0, t)
    log_p = batch_log_path_likelihood(z_t, dataset.points, safe_t, dataset.source_mean, dataset.source_std)
    if conditioned:
        log_p = np.where(dataset.labels[None, :] == dataset.labels[owners][:, None], log_p, -np.inf)
    probs = log_normalize(log_p, axis=1)
    cdf = np.cumsum(probs, axis=1)
    picks = np.minimum(np.sum(cdf < (u * cdf[:, -1])[:, None], axis=1), dataset.n - 1)
    return np.where(t < t_eps, owners, picks)


def theorem1_mc_check(
    dataset: Dataset,
    model: MlpModel,
    n_draws: int,
    rng: SeededRng,
    conditioned: bool = False,
    t_eps: float = DEFAULT_T_EPS,
) -> UnbiasednessResult:
    if dataset.n > MAX_ENUMERATED:
        raise InvalidArgumentError(f"posterior enumeration is limited to N <= {MAX_ENUMERATED}, got {dataset.n}")
    if n_draws < 2:
        raise InvalidArgumentError("need at least two draws")
    fm, pafm, paired = _Moments(), _Moments(), _Moments()
    draw_rng, resample_rng = rng.derive("theorem1"), rng.derive("theorem1-resample")
    for start in range(0, n_draws, _CHUNK):
        n = min(_CHUNK, n_draws - start)

        # both estimators share (z, eps, t), so the error bar is taken on the per-draw difference
        owners, eps, t, z, z_t = _draw(dataset, draw_rng, n)
        prediction = _predict(model, dataset, z_t, t, owners, conditioned)
        diff = prediction - (eps - z)
        fm_loss = np.einsum("bd,bd->b", diff, diff)
        fm.add(fm_loss)

        picks = posterior_resample(dataset, owners, z_t, t, resample_rng.uniform(n), conditioned, t_eps)
        resampled = dataset.points[picks]
        target = np.where((picks == owners)[:, None], eps - z, (z_t - resampled) / np.where(t < t_eps, 1.0, t)[:, None])
        diff = prediction - target
        pafm_loss = np.einsum("bd,bd->b", diff, diff)
        pafm.add(pafm_loss)
        paired.add(fm_loss - pafm_loss)

    fm_mean, fm_se = fm.mean_stderr()
    pafm_mean, pafm_se = pafm.mean_stderr()
    _, paired_se = paired.mean_stderr()
    result = UnbiasednessResult(fm_mean, pafm_mean, fm_se, pafm_se, paired_se, n_draws)
    logger.info(f"🧪 Unbiasedness check: FM {fm_mean:.6g}±{fm_se:.2g}, PAFM {pafm_mean:.6g}±{pafm_se:.2g}, "
                f"paired difference {result.difference:.3g}±{paired_se:.2g} (z={result.z_score:.2f})")
    return result
