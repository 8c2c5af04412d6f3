import argparse
import logging

from pafm.commands.common import CANDIDATES_FILE, add_config_args, candidate_table, load_dataset, resolve
from pafm.data.files import write_candidates
from pafm.errors import ConfigError
from pafm.schemas.common import CommandResult
from pafm.schemas.training import Provider

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "training.provider": args.provider,
        "training.K": args.K,
        "training.conditioned": args.conditioned,
        "training.shortlist_m": args.shortlist_m,
    })
    dataset = load_dataset(config, out_dir)
    table = candidate_table(config, dataset)
    if not table.is_index_based():
        raise ConfigError(
            f"provider {config.training.provider.value} generates new points; "
            "its pools are rebuilt from the seed by `train` and have no candidates file"
        )
    path = write_candidates(table.dataset_rows(), out_dir / CANDIDATES_FILE)
    sizes = table.sizes()
    logger.info(f"💾 Candidate pools written to {path}")
    return CommandResult(
        command="precompute",
        message=f"{table.n_owners} pools, K in [{int(sizes.min())}, {int(sizes.max())}]",
        artifacts=[str(path)],
        data={"provider": config.training.provider.value, "k_max": table.k_max},
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("precompute", help="precompute candidate pools (candidates.csv)")
    add_config_args(parser)
    parser.add_argument("--provider", choices=[Provider.full.value, Provider.knn.value, Provider.shortlist.value],
                        help="index-based candidate provider (default full)")
    parser.add_argument("--K", type=int, help="pool size for knn/shortlist (default 16)")
    parser.add_argument("--shortlist-m", type=int, help="shortlist size M before the latent kNN stage (default 128)")
    parser.add_argument("--conditioned", action="store_true", default=None,
                        help="restrict pools to the owner's class")
    parser.set_defaults(handler=run)
