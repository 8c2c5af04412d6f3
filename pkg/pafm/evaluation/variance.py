"""Mini-batch gradient variance Tr(Sigma_g) = E||g - g_hat||².

g_hat is the mean of the B measured mini-batch gradients. Batch b always
draws from its own stream (seed, "gradvar", b), so the report does not depend
on the order or the thread the batches are evaluated on.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pafm.errors import InvalidArgumentError
from pafm.flow.path import DEFAULT_T_EPS
from pafm.models.dataset import CandidateTable, Dataset
from pafm.models.mlp import MlpModel
from pafm.schemas.training import Objective
from pafm.training.steps import BatchDraw, batch_gradient, draw_batch
from pafm.utils.rng import SeededRng, gaussian_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VarianceReport:
    traces: np.ndarray
    mean_trace: float
    batches: int
    batch_size: int
    objective: str = ""

    def rows(self):
        return [(b, float(v)) for b, v in enumerate(self.traces)]


def traces_from_gradients(gradients: np.ndarray) -> np.ndarray:
    """||g_b - mean(g)||² per row, summed in a fixed order."""
    g_hat = np.zeros(gradients.shape[1])
    for row in gradients:
        g_hat += row
    g_hat /= gradients.shape[0]
    diff = gradients - g_hat[None, :]
    return np.einsum("bp,bp->b", diff, diff)


def gradient_variance(
    model: MlpModel,
    dataset: Dataset,
    objective: Objective,
    table: Optional[CandidateTable],
    batches: int,
    batch_size: int,
    rng: SeededRng,
    conditioned: bool = False,
    t_eps: float = DEFAULT_T_EPS,
    frozen: bool = False,
    workers: int = 1,
) -> VarianceReport:
    """Trace of the mini-batch gradient covariance at a frozen parameter snapshot.

    With ``frozen`` every dataset element keeps one (eps, t) draw for the
    whole measurement and batches only resample which elements they contain.
    """
    if batches < 2:
        raise InvalidArgumentError(f"need at least 2 batches, got {batches}")
    fixed_eps = fixed_t = None
    if frozen:
        frozen_rng = rng.derive("gradvar-frozen")
        fixed_eps = gaussian_batch(frozen_rng, dataset.n, dataset.source_mean, dataset.source_std)
        fixed_t = frozen_rng.uniform(dataset.n)

    def draw_for(b: int) -> BatchDraw:
        stream = rng.derive("gradvar", b)
        if frozen:
            owners = stream.integers(dataset.n, batch_size)
            return BatchDraw(owners, fixed_eps[owners], fixed_t[owners])
        return draw_batch(dataset, stream, batch_size)

    gradients = np.empty((batches, model.n_params))

    def measure(b: int) -> None:
        gradients[b] = batch_gradient(model, dataset, draw_for(b), objective, table, conditioned, t_eps).gradient

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(measure, range(batches)))
    else:
        for b in range(batches):
            measure(b)
    traces = traces_from_gradients(gradients)
    report = VarianceReport(traces, float(np.mean(traces)), batches, batch_size, objective.value)
    logger.info(f"📉 Gradient variance ({objective.value}): mean trace {report.mean_trace:.6g} over {batches} batches")
    return report
