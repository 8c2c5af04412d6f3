"""The training loop: cosine-decayed Adam over FM or PAFM batch steps with metric logging."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from pafm.config import settings
from pafm.errors import ConfigError, NumericFailureError, TrainingAbortedError, WorkbenchError
from pafm.evaluation.field import FieldGrid
from pafm.models.checkpoint import load_checkpoint, save_checkpoint
from pafm.models.dataset import CandidateTable, Dataset
from pafm.models.mlp import MlpModel, init_model
from pafm.schemas.training import ModelConfig, Objective, TrainConfig
from pafm.training.optim import OptimizerState, cosine_lr, load_optimizer, save_optimizer
from pafm.training.steps import apply_gradient, batch_gradient, check_pools, draw_batch, gradient_identity_error
from pafm.data.files import read_table, write_table
from pafm.utils.rng import SeededRng
from pafm.utils.timing import PhaseTimer

logger = logging.getLogger(__name__)

METRICS_HEADER = ("step", "loss", "lr", "ess_mean", "field_mse")
CHECKPOINT_FILE = "checkpoint.bin"
OPTIMIZER_FILE = "optimizer.npz"
METRICS_FILE = "metrics.csv"
AUDIT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class MetricsRow:
    step: int
    loss: float
    lr: float
    ess_mean: float
    field_mse: Optional[float] = None

    def as_tuple(self):
        return (self.step, self.loss, self.lr, self.ess_mean, self.field_mse)


@dataclass
class MetricsLog:
    rows: List[MetricsRow] = field(default_factory=list)

    def append(self, row: MetricsRow) -> None:
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.rows])

    def field_curve(self):
        points = [(r.step, r.field_mse) for r in self.rows if r.field_mse is not None]
        return np.array([p[0] for p in points], dtype=np.int64), np.array([p[1] for p in points])

    def write(self, path) -> Path:
        return write_table(path, METRICS_HEADER, [r.as_tuple() for r in self.rows])

    @classmethod
    def read(cls, path) -> "MetricsLog":
        log = cls()
        for rec in read_table(path):
            log.append(MetricsRow(
                step=int(rec["step"]), loss=float(rec["loss"]), lr=float(rec["lr"]),
                ess_mean=float(rec["ess_mean"]),
                field_mse=float(rec["field_mse"]) if rec["field_mse"] else None,
            ))
        return log


@dataclass
class TrainResult:
    model: MlpModel
    optimizer: OptimizerState
    log: MetricsLog
    timer: PhaseTimer


def initial_model(dataset: Dataset, config: TrainConfig, model_config: ModelConfig) -> MlpModel:
    """Depends only on (seed, architecture), so FM and PAFM runs start from the same weights."""
    seed = 0 if config.seed is None else config.seed
    return init_model(
        dataset.d, SeededRng(seed, "init"), hidden=model_config.hidden, embed_width=model_config.embed_width,
        n_classes=dataset.n_classes if config.conditioned else 0, layers=model_config.layers,
        omega_max=model_config.omega_max,
    )


def _snapshot(model: MlpModel, out_dir: Optional[Path], step: int) -> Optional[str]:
    if out_dir is None:
        return None
    try:
        return str(save_checkpoint(model, out_dir / f"failed_step_{step}.bin"))
    except OSError as exc:
        logger.error(f"❌ Could not write failure snapshot: {exc}")
        return None


def _resume(out_dir: Path, fresh: MlpModel):
    paths = [out_dir / CHECKPOINT_FILE, out_dir / OPTIMIZER_FILE, out_dir / METRICS_FILE]
    if not all(p.exists() for p in paths):
        return None
    model = load_checkpoint(paths[0])
    if model.n_params != fresh.n_params:
        raise ConfigError("checkpoint architecture does not match the configured model")
    optimizer = load_optimizer(paths[1])
    log = MetricsLog([r for r in MetricsLog.read(paths[2]).rows if r.step < optimizer.step])
    logger.info(f"🔁 Resuming from step {optimizer.step}")
    return model, optimizer, log


def save_state(out_dir: Path, model: MlpModel, optimizer: OptimizerState, log: MetricsLog) -> None:
    save_checkpoint(model, out_dir / CHECKPOINT_FILE)
    save_optimizer(optimizer, out_dir / OPTIMIZER_FILE)
    log.write(out_dir / METRICS_FILE)


def train_loop(
    config: TrainConfig,
    model_config: ModelConfig,
    dataset: Dataset,
    table: Optional[CandidateTable] = None,
    grid: Optional[FieldGrid] = None,
    out_dir: Optional[Path] = None,
    resume: bool = False,
    show_progress: Optional[bool] = None,
) -> TrainResult:
    """Run ``config.steps`` optimizer steps. Step s draws from the stream (seed, "train", s)."""
    if config.objective == Objective.PAFM:
        check_pools(dataset, table)
    elif table is not None:
        raise ConfigError("candidate pools are only used by the PAFM objective")
    seed = 0 if config.seed is None else config.seed
    out_dir = Path(out_dir) if out_dir is not None else None

    model = initial_model(dataset, config, model_config)
    optimizer = OptimizerState.zeros(model.n_params)
    log = MetricsLog()
    if resume and out_dir is not None:
        restored = _resume(out_dir, model)
        if restored is not None:
            model, optimizer, log = restored

    timer = PhaseTimer("train")
    show = settings.show_progress if show_progress is None else show_progress
    logger.info(f"🚀 Training {config.objective.value}: steps={config.steps}, batch={config.batch_size}, "
                f"lr0={config.lr0}, provider={config.provider.value if table is not None else '-'}")
    steps = range(optimizer.step, config.steps)
    for step in tqdm(steps, disable=not show, desc=config.objective.value, leave=False):
        lr = cosine_lr(step, config.steps, config.lr0)
        try:
            with timer.phase("step", samples=config.batch_size):
                draw = draw_batch(dataset, SeededRng(seed, "train", step), config.batch_size)
                result = batch_gradient(model, dataset, draw, config.objective, table, config.conditioned, config.t_eps)
                if (config.objective == Objective.PAFM and config.audit_every
                        and step % config.audit_every == 0):
                    error, _, _ = gradient_identity_error(model, dataset, draw, table, config.conditioned, config.t_eps)
                    if error > AUDIT_TOLERANCE:
                        logger.warning(f"⚠️ Step {step}: weighted/collapsed gradient mismatch {error:.3g}")
                step_result = apply_gradient(model, optimizer, result, lr)
                if not np.all(np.isfinite(step_result.model.params)):
                    raise NumericFailureError("non-finite parameters after the optimizer step", index=step)
        except WorkbenchError as exc:
            raise TrainingAbortedError(str(exc), step, _snapshot(model, out_dir, step)) from exc
        except FloatingPointError as exc:
            raise TrainingAbortedError(str(exc), step, _snapshot(model, out_dir, step)) from exc
        model, optimizer = step_result.model, step_result.optimizer

        field_mse = None
        if grid is not None and ((step + 1) % config.eval_every == 0 or step + 1 == config.steps):
            with timer.phase("eval"):
                field_mse = grid.mse(model)
            logger.info(f"📈 step {step + 1}/{config.steps}: loss={result.loss:.5f} ess={result.ess_mean:.2f} field_mse={field_mse:.5f}")
        log.append(MetricsRow(step, result.loss, lr, result.ess_mean, field_mse))

        if out_dir is not None and (step + 1) % config.checkpoint_every == 0:
            with timer.phase("checkpoint"):
                save_state(out_dir, model, optimizer, log)

    if out_dir is not None:
        save_state(out_dir, model, optimizer, log)
    logger.info(f"✅ Training finished after {len(log)} logged steps")
    return TrainResult(model, optimizer, log, timer)
