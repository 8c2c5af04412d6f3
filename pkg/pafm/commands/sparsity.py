"""Data-sparsity sweep: FM vs PAFM trained on progressively smaller subsamples."""
import argparse
import logging

import numpy as np

from pafm.commands.common import add_config_args, candidate_table, resolve, truth_draw
from pafm.commands.sample import generate
from pafm.data.files import write_table
from pafm.data.synthetic import make_dataset, subsample
from pafm.evaluation.density import energy_distance, kde_many
from pafm.schemas.common import CommandResult
from pafm.schemas.training import Objective
from pafm.training.loop import train_loop
from pafm.utils.plotting import density_image, heatmap_grid_svg
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

SPARSITY_FILE = "sparsity.csv"
SPARSITY_FIGURE = "sparsity_kde.svg"


def _extent(points: np.ndarray, margin: float = 0.5):
    lo, hi = points.min(axis=0) - margin, points.max(axis=0) + margin
    return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])


def run(args: argparse.Namespace) -> CommandResult:
    overrides = {"sparsity.steps": args.steps}
    if args.n:
        overrides["sparsity.n_values"] = args.n
    config, out_dir = resolve(args, overrides)
    full = make_dataset(config.dataset)
    truth = truth_draw(config)
    bandwidth = config.evaluation.kde_bandwidth
    extent = _extent(truth)

    rows, images = [], {"ground truth": [], "FM": [], "PAFM": []}
    for n_total in config.sparsity.n_values:
        dataset = subsample(full, n_total, SeededRng(config.seed, "subsample", n_total))
        images["ground truth"].append(density_image(lambda q: kde_many(truth, q, bandwidth), extent))
        for objective in (Objective.FM, Objective.PAFM):
            training = config.training.model_copy(update={"objective": objective, "steps": config.sparsity.steps})
            table = candidate_table(config, dataset) if objective == Objective.PAFM else None
            model = train_loop(training, config.model, dataset, table).model
            samples = generate(model, dataset, config.evaluation.n_samples, config.evaluation.euler_steps,
                               SeededRng(config.seed, "sample"))
            distance = energy_distance(samples, truth)
            rows.append((n_total, objective.value, distance))
            images[objective.value].append(density_image(lambda q: kde_many(samples, q, bandwidth), extent))
            logger.info(f"🧮 N={n_total} {objective.value}: energy distance {distance:.5g}")

    table_path = write_table(out_dir / SPARSITY_FILE, ("n", "objective", "energy_distance"), rows)
    figure = heatmap_grid_svg(
        out_dir / SPARSITY_FIGURE, [images[k] for k in ("ground truth", "FM", "PAFM")], extent,
        row_titles=["ground truth", "FM", "PAFM"], col_titles=[f"N={n}" for n in config.sparsity.n_values],
    )
    return CommandResult(
        command="sparsity",
        message=f"{len(config.sparsity.n_values)} dataset sizes swept",
        artifacts=[str(table_path), str(figure)],
        data={f"{n}/{o}": d for n, o, d in rows},
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("sparsity", help="FM vs PAFM energy distance across training-set sizes")
    add_config_args(parser)
    parser.add_argument("--n", type=int, action="append", help="training-set size (repeatable; default 100 200 500 1000)")
    parser.add_argument("--steps", type=int, help="training steps per run (default 15000)")
    parser.set_defaults(handler=run)
