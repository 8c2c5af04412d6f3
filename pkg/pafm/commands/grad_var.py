import argparse
import logging
from pathlib import Path

import numpy as np

from pafm.commands.common import OBJECTIVES, add_config_args, candidate_table, load_dataset, load_model, resolve
from pafm.data.files import write_table
from pafm.evaluation.variance import gradient_variance
from pafm.models.checkpoint import load_checkpoint
from pafm.schemas.common import CommandResult
from pafm.schemas.training import Objective
from pafm.utils.plotting import line_svg
from pafm.utils.rng import SeededRng

logger = logging.getLogger(__name__)

GRAD_VAR_FILE = "grad_var.csv"
GRAD_VAR_SUMMARY_FILE = "grad_var_summary.csv"
GRAD_VAR_FIGURE = "grad_var.svg"


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "evaluation.grad_var_batches": args.batches,
        "evaluation.grad_var_batch_size": args.batch_size,
        "evaluation.grad_var_frozen": args.frozen,
    })
    dataset = load_dataset(config, out_dir)
    model = load_checkpoint(Path(args.checkpoint)) if args.checkpoint else load_model(out_dir, args.snapshot)
    config.training.conditioned = model.conditioned
    evaluation = config.evaluation

    reports = {}
    for name in OBJECTIVES:
        objective = Objective(name)
        table = candidate_table(config, dataset) if objective == Objective.PAFM else None
        reports[name] = gradient_variance(
            model, dataset, objective, table, evaluation.grad_var_batches, evaluation.grad_var_batch_size,
            SeededRng(config.seed), conditioned=model.conditioned, t_eps=config.training.t_eps,
            frozen=evaluation.grad_var_frozen, workers=args.workers,
        )

    rows = [(name, b, trace) for name, report in reports.items() for b, trace in report.rows()]
    ratio = reports["FM"].mean_trace / reports["PAFM"].mean_trace if reports["PAFM"].mean_trace > 0 else float("inf")
    summary = [(name, r.mean_trace, r.batches, r.batch_size) for name, r in reports.items()]
    artifacts = [
        str(write_table(out_dir / GRAD_VAR_FILE, ("objective", "batch", "trace"), rows)),
        str(write_table(out_dir / GRAD_VAR_SUMMARY_FILE, ("objective", "mean_trace", "batches", "batch_size"), summary)),
        str(line_svg(
            out_dir / GRAD_VAR_FIGURE,
            {name: (np.arange(r.batches), r.traces) for name, r in reports.items()},
            "batch", "||g_b - g_hat||²", title="Mini-batch gradient variance", log_y=True,
        )),
    ]
    logger.info(f"📉 Variance ratio FM/PAFM = {ratio:.3f}")
    return CommandResult(
        command="grad-var",
        message=f"FM/PAFM variance ratio {ratio:.3f}",
        artifacts=artifacts,
        data={"FM": reports["FM"].mean_trace, "PAFM": reports["PAFM"].mean_trace, "ratio": ratio},
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("grad-var", help="mini-batch gradient variance of FM and PAFM at one snapshot")
    add_config_args(parser)
    parser.add_argument("--snapshot", choices=list(OBJECTIVES), default="PAFM",
                        help="run whose checkpoint.bin is the frozen snapshot (default PAFM)")
    parser.add_argument("--checkpoint", help="explicit checkpoint file, e.g. a mid-training snapshot")
    parser.add_argument("--batches", type=int, help="number of batches B (default 500)")
    parser.add_argument("--batch-size", type=int, help="batch size (default 256)")
    parser.add_argument("--frozen", action="store_true", default=None,
                        help="fix (eps, t) per dataset element for the whole measurement")
    parser.add_argument("--workers", type=int, default=1, help="threads evaluating batches")
    parser.set_defaults(handler=run)
