import argparse
import logging
import math
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from pafm.commands.common import (
    METRICS_FILE, add_config_args, load_dataset, load_model, resolve, trained_objectives,
)
from pafm.data.files import write_table
from pafm.evaluation.density import moving_average
from pafm.evaluation.field import build_field_grid, grid_times
from pafm.schemas.common import CommandResult
from pafm.schemas.experiment import ExperimentConfig
from pafm.training.loop import MetricsLog
from pafm.utils.plotting import line_svg
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

FIELD_EVAL_FILE = "field_eval.csv"
FIELD_BY_TIME_FILE = "field_by_time.csv"
FIELD_FIGURE = "field_mse.svg"
LOSS_FIGURE = "loss.svg"


def field_curves(config: ExperimentConfig, out_dir: Path, objectives) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """Logged field-MSE curves smoothed over ``moving_average`` training steps."""
    window = max(1, math.ceil(config.evaluation.moving_average / config.training.eval_every))
    curves = {}
    for objective in objectives:
        path = out_dir / objective / METRICS_FILE
        if not path.exists():
            continue
        steps, values = MetricsLog.read(path).field_curve()
        if values.size:
            curves[objective] = (steps + 1, moving_average(values, window))
    return curves


def loss_curves(config: ExperimentConfig, out_dir: Path, objectives) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    curves = {}
    for objective in objectives:
        path = out_dir / objective / METRICS_FILE
        if path.exists():
            losses = MetricsLog.read(path).losses()
            if losses.size:
                curves[objective] = (np.arange(losses.size), moving_average(losses, config.evaluation.moving_average))
    return curves


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "evaluation.grid_points": args.grid_points,
        "evaluation.grid_times": args.grid_times,
        "evaluation.field_t_min": args.field_t_min,
    })
    dataset = load_dataset(config, out_dir)
    objectives = trained_objectives(out_dir, args.objective)
    evaluation, training = config.evaluation, config.training
    grid = build_field_grid(
        dataset, evaluation.grid_points, grid_times(evaluation.grid_times, evaluation.field_t_min),
        SeededRng(evaluation.eval_seed, "evalgrid"), training.conditioned, training.t_eps,
    )
    rows, by_time = [], []
    for objective in objectives:
        model = load_model(out_dir, objective)
        times, errors = grid.mse_by_time(model)
        mse = float(np.mean(errors))
        rows.append((objective, mse))
        by_time.extend((objective, float(t), float(e)) for t, e in zip(times, errors))
        logger.info(f"📏 {objective}: field MSE {mse:.6g} over {grid.size} grid points, "
                    f"worst at t={times[np.argmax(errors)]:.3f}")
    artifacts = [
        str(write_table(out_dir / FIELD_EVAL_FILE, ("objective", "field_mse"), rows)),
        str(write_table(out_dir / FIELD_BY_TIME_FILE, ("objective", "t", "field_mse"), by_time)),
    ]

    curves = field_curves(config, out_dir, objectives)
    if curves:
        artifacts.append(str(line_svg(out_dir / FIELD_FIGURE, curves, "training step", "velocity-field MSE",
                                      title="Velocity-field error vs. oracle", log_y=True)))
    return CommandResult(
        command="eval-field",
        message=", ".join(f"{o}={m:.4g}" for o, m in rows),
        artifacts=artifacts,
        data={o: m for o, m in rows},
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval-field", help="velocity-field MSE against the analytic oracle")
    add_config_args(parser)
    parser.add_argument("--objective", action="append", choices=["FM", "PAFM"],
                        help="model(s) to evaluate; default every trained one")
    parser.add_argument("--grid-points", type=int, help="fresh interpolant draws (default 4096)")
    parser.add_argument("--grid-times", type=int, help="evenly spaced t values in [t_min, 1) (default 16)")
    parser.add_argument("--field-t-min", type=float, help="smallest grid time cell edge (default 0.1)")
    parser.set_defaults(handler=run)
