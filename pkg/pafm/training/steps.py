"""FM and PAFM batch steps.

Both objectives consume randomness in the same fixed order (owner indices,
then eps per element, then t per element) and PAFM draws nothing extra, so a
PAFM step on owner-only pools reproduces the FM step bit for bit.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from pafm.errors import ConfigError
from pafm.flow.path import DEFAULT_T_EPS
from pafm.flow.posterior import BatchTargets, batch_snis
from pafm.models.dataset import UNCONDITIONAL, CandidateTable, Dataset
from pafm.models.mlp import MlpModel, backward, weighted_sum_backward
from pafm.schemas.training import Objective
from pafm.training.optim import OptimizerState, adam_step
from pafm.utils.rng import SeededRng, gaussian_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchDraw:
    owners: np.ndarray
    eps: np.ndarray
    t: np.ndarray


@dataclass(frozen=True)
class BatchGradient:
    loss: float
    gradient: np.ndarray
    ess_mean: float
    targets: Optional[BatchTargets] = None


@dataclass(frozen=True)
class StepResult:
    loss: float
    model: MlpModel
    optimizer: OptimizerState
    ess_mean: float


def draw_batch(dataset: Dataset, rng: SeededRng, batch_size: int) -> BatchDraw:
    owners = rng.integers(dataset.n, batch_size)
    eps = gaussian_batch(rng, batch_size, dataset.source_mean, dataset.source_std)
    t = rng.uniform(batch_size)
    return BatchDraw(owners, eps, t)


def _inputs(dataset: Dataset, draw: BatchDraw, conditioned: bool):
    z = dataset.points[draw.owners]
    z_t = draw.t[:, None] * draw.eps + (1.0 - draw.t)[:, None] * z
    y = dataset.labels[draw.owners] if conditioned else np.full(draw.owners.shape, UNCONDITIONAL, dtype=np.int64)
    return z, z_t, y


def check_pools(dataset: Dataset, table: Optional[CandidateTable]) -> None:
    if table is None:
        raise ConfigError("PAFM needs candidate pools")
    if table.n_owners != dataset.n:
        raise ConfigError(f"candidate pools cover {table.n_owners} owners but the dataset has {dataset.n} points")
    owners = np.arange(dataset.n)
    if np.any(table.indices[owners, table.owner_columns] != owners):
        raise ConfigError("some candidate pools do not contain their owner")


def batch_gradient(
    model: MlpModel,
    dataset: Dataset,
    draw: BatchDraw,
    objective: Objective,
    table: Optional[CandidateTable] = None,
    conditioned: bool = False,
    t_eps: float = DEFAULT_T_EPS,
    weighted_form: bool = False,
) -> BatchGradient:
    """Loss and parameter gradient for one drawn batch.

    ``weighted_form`` regresses on every candidate with its weight instead of
    on the collapsed target; the parameter gradient is the same.
    """
    z, z_t, y = _inputs(dataset, draw, conditioned)
    model_y = y if model.conditioned else None
    if objective == Objective.FM:
        loss, grad = backward(model, z_t, draw.t, model_y, draw.eps - z)
        return BatchGradient(loss, grad, 1.0)
    targets = batch_snis(table, draw.owners, z_t, draw.eps, draw.t, y, t_eps,
                         dataset.source_mean, dataset.source_std, with_velocities=weighted_form)
    if weighted_form:
        loss, grad = weighted_sum_backward(model, z_t, draw.t, model_y, targets.velocities, targets.weights)
    else:
        loss, grad = backward(model, z_t, draw.t, model_y, targets.collapsed)
    return BatchGradient(loss, grad, float(np.mean(targets.ess)), targets)


def apply_gradient(model: MlpModel, optimizer: OptimizerState, result: BatchGradient, lr: float) -> StepResult:
    new_optimizer, new_params = adam_step(optimizer, model.params, result.gradient, lr)
    return StepResult(result.loss, model.with_params(new_params), new_optimizer, result.ess_mean)


def fm_batch_step(
    model: MlpModel,
    optimizer: OptimizerState,
    dataset: Dataset,
    rng: SeededRng,
    batch_size: int,
    lr: float,
    conditioned: bool = False,
) -> StepResult:
    draw = draw_batch(dataset, rng, batch_size)
    return apply_gradient(model, optimizer, batch_gradient(model, dataset, draw, Objective.FM, conditioned=conditioned), lr)


def pafm_batch_step(
    model: MlpModel,
    optimizer: OptimizerState,
    dataset: Dataset,
    table: CandidateTable,
    rng: SeededRng,
    batch_size: int,
    lr: float,
    conditioned: bool = False,
    t_eps: float = DEFAULT_T_EPS,
) -> StepResult:
    draw = draw_batch(dataset, rng, batch_size)
    result = batch_gradient(model, dataset, draw, Objective.PAFM, table, conditioned, t_eps)
    return apply_gradient(model, optimizer, result, lr)


def gradient_identity_error(
    model: MlpModel,
    dataset: Dataset,
    draw: BatchDraw,
    table: CandidateTable,
    conditioned: bool = False,
    t_eps: float = DEFAULT_T_EPS,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Max relative difference between weighted-sum and collapsed-target gradients."""
    collapsed = batch_gradient(model, dataset, draw, Objective.PAFM, table, conditioned, t_eps).gradient
    weighted = batch_gradient(model, dataset, draw, Objective.PAFM, table, conditioned, t_eps, weighted_form=True).gradient
    scale = max(float(np.max(np.abs(collapsed))), 1e-300)
    return float(np.max(np.abs(collapsed - weighted)) / scale), collapsed, weighted
