import argparse
import logging
from pathlib import Path

from pafm.commands.common import (
    add_config_args, candidate_table, load_dataset, resolve, run_dir, write_timing,
)
from pafm.data.files import read_candidates
from pafm.evaluation.field import build_field_grid, grid_times
from pafm.models.dataset import table_from_rows
from pafm.schemas.common import CommandResult
from pafm.schemas.training import Objective, Provider
from pafm.training.loop import CHECKPOINT_FILE, METRICS_FILE, train_loop
from pafm.utils.rng import SeededRng
from pafm.utils.timing import PhaseTimer

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> CommandResult:
    config, out_dir = resolve(args, {
        "training.objective": args.objective,
        "training.provider": args.provider,
        "training.K": args.K,
        "training.steps": args.steps,
        "training.batch_size": args.batch_size,
        "training.lr0": args.lr,
        "training.conditioned": args.conditioned,
    })
    training, evaluation = config.training, config.evaluation
    timer = PhaseTimer("train")

    with timer.phase("load"):
        dataset = load_dataset(config, out_dir)
    table = None
    if training.objective == Objective.PAFM:
        with timer.phase("candidates"):
            if args.candidates:
                table = table_from_rows(dataset, read_candidates(Path(args.candidates)))
                table.uniform_condition = training.provider == Provider.shortlist
            else:
                table = candidate_table(config, dataset)
    with timer.phase("eval_grid"):
        grid = build_field_grid(
            dataset, evaluation.grid_points, grid_times(evaluation.grid_times, evaluation.field_t_min),
            SeededRng(evaluation.eval_seed, "evalgrid"), training.conditioned, training.t_eps,
        )

    directory = run_dir(out_dir, training.objective.value)
    result = train_loop(training, config.model, dataset, table, grid, directory, resume=args.resume)

    report = timer.report(training.objective.value)
    loop_report = result.timer.report(training.objective.value)
    report = report.model_copy(update={
        "samples_processed": loop_report.samples_processed,
        "samples_per_sec": loop_report.samples_per_sec,
        "phases": report.phases + loop_report.phases,
    })
    timing_path = write_timing(report, directory)
    final = result.log.rows[-1] if result.log.rows else None
    logger.info(f"⏱️ {training.objective.value}: {report.samples_per_sec:.0f} samples/sec")
    return CommandResult(
        command="train",
        message=f"{training.objective.value} trained for {training.steps} steps",
        artifacts=[str(directory / CHECKPOINT_FILE), str(directory / METRICS_FILE), str(timing_path)],
        data={
            "objective": training.objective.value,
            "final_loss": final.loss if final else None,
            "final_field_mse": final.field_mse if final else None,
            "samples_per_sec": report.samples_per_sec,
        },
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train FM or PAFM (checkpoint.bin, metrics.csv, timing.json)")
    add_config_args(parser)
    parser.add_argument("--objective", choices=[o.value for o in Objective], help="training objective (default PAFM)")
    parser.add_argument("--provider", choices=[p.value for p in Provider], help="candidate provider (default full)")
    parser.add_argument("--K", type=int, help="candidate pool size (default 16; ignored by full support)")
    parser.add_argument("--steps", type=int, help="optimizer steps (default 50000)")
    parser.add_argument("--batch-size", type=int, help="batch size (default 256)")
    parser.add_argument("--lr", type=float, help="initial Adam learning rate, cosine-decayed (default 5e-4)")
    parser.add_argument("--conditioned", action="store_true", default=None, help="train a class-conditioned model")
    parser.add_argument("--candidates", help="candidates.csv from `precompute` instead of building pools")
    parser.add_argument("--resume", action="store_true", help="continue from checkpoint.bin + optimizer.npz")
    parser.set_defaults(handler=run)
