import argparse
import logging
import sys
from typing import List, Optional

from pafm.config import VERSION, settings
from pafm.commands import eval_field, gen_data, grad_var, precompute, report, sample, schema, sparsity, train
from pafm.errors import WorkbenchError
from pafm.schemas.common import ErrorReport

# Configure logging
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pafm",
        description="Flow matching vs posterior-augmented flow matching on toy datasets",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register subcommands
    gen_data.register(subparsers)
    precompute.register(subparsers)
    train.register(subparsers)
    sample.register(subparsers)
    eval_field.register(subparsers)
    grad_var.register(subparsers)
    report.register(subparsers)
    sparsity.register(subparsers)  # data-sparsity sweep
    schema.register(subparsers)
    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 on runtime/I-O failure, 2 on usage/config errors."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    logger.info(f"🚀 pafm {VERSION} {args.command} ({settings.environment})")

    try:
        result = args.handler(args)
    except WorkbenchError as e:
        logger.error(f"❌ {args.command} failed: {e.message}")
        error = ErrorReport(command=args.command, message=e.message, error_code=e.error_code, exit_code=e.exit_code)
        print(error.model_dump_json())
        return e.exit_code
    except Exception as e:
        logger.exception(f"❌ {args.command} crashed: {e}")
        print(ErrorReport(command=args.command, message=str(e), error_code="internal_error").model_dump_json())
        return 1

    print(result.model_dump_json())
    logger.info(f"✅ {args.command} finished")
    return 0


if __name__ == "__main__":
    sys.exit(main())
