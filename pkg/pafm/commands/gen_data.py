import argparse
import logging

from pafm.commands.common import DATASET_FILE, add_config_args, resolve
from pafm.data.files import write_dataset
from pafm.data.synthetic import make_dataset
from pafm.schemas.common import CommandResult
from pafm.schemas.dataset import DatasetFamily

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "dataset.family": args.family,
        "dataset.n_per_class": args.n_per_class,
        "dataset.noise_std": args.noise_std,
        "dataset.n_total": args.n_total,
    })
    dataset = make_dataset(config.dataset)
    path = write_dataset(dataset, out_dir / DATASET_FILE)
    logger.info(f"💾 Dataset written to {path}")
    return CommandResult(
        command="gen-data",
        message=f"{dataset.n} points, {dataset.n_classes} classes",
        artifacts=[str(path)],
        data={"n": dataset.n, "d": dataset.d, "labels": list(dataset.label_set)},
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen-data", help="generate the synthetic dataset (dataset.csv)")
    add_config_args(parser)
    parser.add_argument("--family", choices=[f.value for f in DatasetFamily], help="dataset family (default two_moons)")
    parser.add_argument("--n-per-class", type=int, help="points per class (default 1000)")
    parser.add_argument("--noise-std", type=float, help="isotropic jitter std (default 0.05)")
    parser.add_argument("--n-total", type=int, help="class-balanced subsample size applied after generation")
    parser.set_defaults(handler=run)
