"""Helpers shared by the subcommands: config flags, artifact lookup, run directories."""
import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np

from pafm.data.files import read_dataset
from pafm.data.synthetic import make_dataset
from pafm.errors import ArtifactMissingError
from pafm.flow.providers import build_candidate_table
from pafm.experiment import load_experiment_config, output_dir, write_resolved_config
from pafm.models.checkpoint import load_checkpoint
from pafm.models.dataset import Dataset
from pafm.models.mlp import MlpModel
from pafm.schemas.common import TimingReport
from pafm.schemas.experiment import ExperimentConfig
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
CANDIDATES_FILE = "candidates.csv"
CHECKPOINT_FILE = "checkpoint.bin"
METRICS_FILE = "metrics.csv"
SAMPLES_FILE = "samples.csv"
TIMING_FILE = "timing.json"
OBJECTIVES = ("FM", "PAFM")


def add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config JSON (see `python -m pafm schema`)")
    parser.add_argument("--out", help="output directory (default: config output_dir or PAFM_OUTPUT_DIR)")
    parser.add_argument("--seed", type=int, help="experiment seed (overrides the config and PAFM_SEED)")


def resolve(args: argparse.Namespace, overrides: Optional[Dict[str, Any]] = None):
    """Load the experiment config for a command and prepare its output directory."""
    merged = {"seed": args.seed}
    merged.update(overrides or {})
    config = load_experiment_config(args.config, merged)
    out_dir = output_dir(config, args.out)
    write_resolved_config(config, out_dir)
    return config, out_dir


def require(directory: Path, names: Iterable[str]) -> None:
    missing = [name for name in names if not (directory / name).exists()]
    if missing:
        raise ArtifactMissingError(missing, str(directory))


def run_dir(out_dir: Path, objective: str) -> Path:
    """Per-objective subdirectory holding checkpoint, metrics, samples and timing."""
    directory = out_dir / objective
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def load_dataset(config: ExperimentConfig, out_dir: Path) -> Dataset:
    require(out_dir, [DATASET_FILE])
    return read_dataset(out_dir / DATASET_FILE, config.dataset.source_mean, config.dataset.source_std)


def load_model(out_dir: Path, objective: str) -> MlpModel:
    require(out_dir, [f"{objective}/{CHECKPOINT_FILE}"])
    return load_checkpoint(out_dir / objective / CHECKPOINT_FILE)


def truth_draw(config: ExperimentConfig) -> np.ndarray:
    """Fresh draw from the generating distribution, independent of the training set."""
    n_groups = 2 if config.dataset.family.value == "two_moons" else len(config.dataset.centers)
    spec = config.dataset.model_copy(update={
        "n_per_class": max(1, config.evaluation.truth_samples // n_groups),
        "n_total": None,
    })
    return make_dataset(spec, SeededRng(config.seed, "truth")).points


def write_timing(report: TimingReport, directory: Path) -> Path:
    path = directory / TIMING_FILE
    path.write_text(json.dumps(report.model_dump(mode="json"), indent=2) + "\n")
    return path


def read_timing(directory: Path) -> Optional[TimingReport]:
    path = directory / TIMING_FILE
    if not path.exists():
        return None
    return TimingReport.model_validate_json(path.read_text())


def candidate_table(config: ExperimentConfig, dataset: Dataset):
    """Pools for the configured provider; every stochastic provider draws from (seed, "candidates", i)."""
    training = config.training
    return build_candidate_table(
        dataset, training.provider.value, training.K, training.conditioned, SeededRng(config.seed),
        sigma=training.sigma, augment_scale=training.augment_scale, shortlist_m=training.shortlist_m,
    )


def trained_objectives(out_dir: Path, requested: Optional[Iterable[str]] = None) -> list:
    """The requested objectives, or every objective with a checkpoint under ``out_dir``."""
    if requested:
        return list(requested)
    found = [o for o in OBJECTIVES if (out_dir / o / CHECKPOINT_FILE).exists()]
    if not found:
        raise ArtifactMissingError([f"{o}/{CHECKPOINT_FILE}" for o in OBJECTIVES], str(out_dir))
    return found
