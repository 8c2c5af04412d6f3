import argparse
import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from pafm.commands.common import (
    DATASET_FILE, METRICS_FILE, OBJECTIVES, SAMPLES_FILE, add_config_args, load_dataset, read_timing, require, resolve,
    truth_draw,
)
from pafm.commands.eval_field import FIELD_FIGURE, LOSS_FIGURE, field_curves, loss_curves
from pafm.data.files import read_samples, write_table
from pafm.evaluation.density import energy_distance, mean_nearest_distance
from pafm.schemas.common import CommandResult
from pafm.training.loop import MetricsLog
from pafm.utils.plotting import line_svg, scatter_svg

logger = logging.getLogger(__name__)

REPORT_FILE = "report.csv"
SUMMARY_FILE = "report.json"
FINAL_WINDOW = 1000


def required_files():
    return [DATASET_FILE] + [f"{o}/{name}" for o in OBJECTIVES for name in (METRICS_FILE, SAMPLES_FILE)]


def final_field_mse(log: MetricsLog, window: int = FINAL_WINDOW) -> float:
    """Mean logged field MSE over the last ``window`` training steps."""
    steps, values = log.field_curve()
    if values.size == 0:
        return float("nan")
    return float(np.mean(values[steps >= steps[-1] - window + 1]))


def throughput_ratio(out_dir: Path) -> Optional[float]:
    """FM samples/sec over PAFM samples/sec from the two timing.json files; None if either is missing."""
    fm, pafm = read_timing(out_dir / "FM"), read_timing(out_dir / "PAFM")
    if fm is None or pafm is None or pafm.samples_per_sec <= 0:
        return None
    return fm.samples_per_sec / pafm.samples_per_sec


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args)
    require(out_dir, required_files())
    dataset = load_dataset(config, out_dir)
    truth = truth_draw(config)

    rows, samples = [], {}
    for objective in OBJECTIVES:
        log = MetricsLog.read(out_dir / objective / METRICS_FILE)
        samples[objective] = read_samples(out_dir / objective / SAMPLES_FILE)
        rows.append((
            objective,
            final_field_mse(log),
            energy_distance(samples[objective], truth),
            mean_nearest_distance(samples[objective], dataset.points),
        ))
    header = ("objective", "final_field_mse", "energy_distance", "mean_nearest_distance")
    artifacts = [str(write_table(out_dir / REPORT_FILE, header, rows))]

    summary = {row[0]: dict(zip(header[1:], row[1:])) for row in rows}
    fm_mse, pafm_mse = summary["FM"]["final_field_mse"], summary["PAFM"]["final_field_mse"]
    summary["field_mse_ratio"] = pafm_mse / fm_mse if fm_mse > 0 else None
    summary["throughput_ratio"] = throughput_ratio(out_dir)
    (out_dir / SUMMARY_FILE).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    artifacts.append(str(out_dir / SUMMARY_FILE))

    artifacts.append(str(scatter_svg(out_dir / "samples.svg",
                                     [("data", dataset.points)] + [(o, samples[o]) for o in OBJECTIVES],
                                     title="Generated vs. target points")))
    curves = field_curves(config, out_dir, OBJECTIVES)
    if curves:
        artifacts.append(str(line_svg(out_dir / FIELD_FIGURE, curves, "training step", "velocity-field MSE",
                                      title="Velocity-field error vs. oracle", log_y=True)))
    artifacts.append(str(line_svg(out_dir / LOSS_FIGURE, loss_curves(config, out_dir, OBJECTIVES),
                                  "training step", "loss", title="Training loss", log_y=True)))
    logger.info(f"📋 Report: PAFM/FM final field MSE ratio {summary['field_mse_ratio']}")
    if summary["throughput_ratio"] is not None:
        logger.info(f"⏱️ FM runs {summary['throughput_ratio']:.2f}x the PAFM samples/sec")
    return CommandResult(command="report", message="report written", artifacts=artifacts, data=summary)


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="summary table and figures for an FM vs PAFM run directory")
    add_config_args(parser)
    parser.set_defaults(handler=run)
