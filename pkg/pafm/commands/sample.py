import argparse
import logging

import numpy as np

from pafm.commands.common import OBJECTIVES, SAMPLES_FILE, add_config_args, load_dataset, load_model, resolve, run_dir, trained_objectives
from pafm.data.files import write_samples
from pafm.evaluation.sampler import euler_sample
from pafm.schemas.common import CommandResult
from pafm.utils.plotting import scatter_svg
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)


def generate(model, dataset, n_samples: int, n_steps: int, rng: SeededRng) -> np.ndarray:
    """Unconditioned models sample once; conditioned ones split ``n_samples`` evenly over classes."""
    if not model.conditioned:
        return euler_sample(model, n_samples, n_steps, rng, dataset.source_mean, dataset.source_std)
    counts = np.full(dataset.n_classes, n_samples // dataset.n_classes)
    counts[: n_samples % dataset.n_classes] += 1
    parts = [
        euler_sample(model, int(count), n_steps, rng.derive("sample", c), dataset.source_mean, dataset.source_std, y=c)
        for c, count in enumerate(counts) if count
    ]
    return np.vstack(parts)


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "evaluation.n_samples": args.n_samples,
        "evaluation.euler_steps": args.euler_steps,
    })
    dataset = load_dataset(config, out_dir)
    artifacts = []
    for objective in trained_objectives(out_dir, args.objective):
        model = load_model(out_dir, objective)
        samples = generate(model, dataset, config.evaluation.n_samples, config.evaluation.euler_steps,
                           SeededRng(config.seed, "sample"))
        directory = run_dir(out_dir, objective)
        artifacts.append(str(write_samples(samples, directory / SAMPLES_FILE)))
        artifacts.append(str(scatter_svg(directory / "samples.svg", [("data", dataset.points), (objective, samples)],
                                         title=f"{objective} samples")))
        logger.info(f"✨ {objective}: {samples.shape[0]} samples after {config.evaluation.euler_steps} Euler steps")
    return CommandResult(command="sample", message=f"{len(artifacts) // 2} sample sets written", artifacts=artifacts)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sample", help="Euler-sample trained models (samples.csv)")
    add_config_args(parser)
    parser.add_argument("--objective", action="append", choices=list(OBJECTIVES),
                        help="model(s) to sample; default every trained one")
    parser.add_argument("--n-samples", type=int, help="samples per model (default 5000)")
    parser.add_argument("--euler-steps", type=int, help="Euler steps from t=1 to t=0 (default 300)")
    parser.set_defaults(handler=run)
