import argparse
import json
import logging
from pathlib import Path

from pafm.schemas.common import CommandResult
from pafm.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> CommandResult:
    path = Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(ExperimentConfig.model_json_schema(), indent=2, sort_keys=True) + "\n")
    logger.info(f"📄 Config schema written to {path}")
    return CommandResult(command="schema", artifacts=[str(path)])


def register(subparsers) -> None:
    parser = subparsers.add_parser("schema", help="write the experiment config JSON schema")
    parser.add_argument("--output", default="config.schema.json", help="destination (default config.schema.json)")
    parser.set_defaults(handler=run)
