"""Main application entry point."""
import argparse
import sys
from typing import List, Optional

from .config import load_config
from .errors import PcdForgeError
from .services import (
    CompareService,
    EvaluationService,
    PlotService,
    RegistryService,
    run_sweep,
)
from .utils import format_duration, output_root


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcdforge",
        description="Performance-conditioned diversity GANs on 2D benchmarks",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train one run or a seed sweep")
    train.add_argument("--example", type=int, choices=(1, 2), default=None)
    train.add_argument("--model", choices=("pcdgan", "ccgan"), default=None)
    seeds = train.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, default=None)
    seeds.add_argument("--seeds", type=int, nargs="+", default=None)
    train.add_argument("--jobs", type=int, default=1, help="parallel runs for --seeds")
    train.add_argument("--config", default=None, help="key = value config file")
    train.add_argument("--steps", type=int, default=None)
    train.add_argument("--no-eval", action="store_true", help="skip the final evaluation")
    train.add_argument("--quiet", action="store_true")

    evaluate = commands.add_parser("eval", help="evaluate a checkpoint")
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--full-protocol", action="store_true")
    evaluate.add_argument("--out", default=None)
    evaluate.add_argument("--jobs", type=int, default=1, help="threads for condition cells")
    evaluate.add_argument("--quiet", action="store_true")

    plot = commands.add_parser("plot", help="SVG figures from evaluated runs")
    plot.add_argument("--runs", nargs="+", required=True)
    plot.add_argument("--condition", type=float, default=None)
    plot.add_argument("--out", default=None)

    compare = commands.add_parser("compare", help="summary CSV across runs")
    compare.add_argument("--runs", nargs="+", required=True)
    compare.add_argument("--out", required=True)

    commands.add_parser("runs", help="list registered runs")
    return parser


def cmd_train(args) -> int:
    overrides = {"example_id": args.example, "model": args.model, "steps": args.steps}
    seeds = args.seeds if args.seeds is not None else [args.seed]
    configs = [load_config(args.config, **overrides, seed=seed) for seed in seeds]
    run_dirs = run_sweep(configs, jobs=args.jobs, evaluate_after=not args.no_eval,
                         verbose=not args.quiet)
    for run_dir in run_dirs:
        print(f"✅ Run complete: {run_dir}")
    return 0


def cmd_eval(args) -> int:
    registry = RegistryService.open()
    try:
        EvaluationService(verbose=not args.quiet, registry=registry).evaluate_checkpoint(
            args.checkpoint, full_protocol=args.full_protocol, out_dir=args.out, jobs=args.jobs
        )
    finally:
        registry.close()
    return 0


def cmd_plot(args) -> int:
    PlotService().emit_plots(args.runs, condition=args.condition, out_dir=args.out)
    return 0


def cmd_compare(args) -> int:
    CompareService().compare(args.runs, args.out)
    return 0


def cmd_runs(args) -> int:
    registry = RegistryService.open()
    try:
        runs = registry.list_runs()
        if not runs:
            print(f"No runs registered under {output_root()}")
            return 0
        for run in runs:
            evaluation = registry.latest_evaluation(run.run_id)
            metrics = ""
            if evaluation is not None and evaluation.likelihood_mean is not None:
                metrics = (f" | err {evaluation.label_error_mean:.4f}"
                           f" lik {evaluation.likelihood_mean:.3f}"
                           f" div {evaluation.diversity_mean:.3f}")
            duration = format_duration(run.duration_seconds or 0.0)
            print(f"{run.status:<9} {run.run_id} ({run.steps_completed} steps, {duration}){metrics}")
    finally:
        registry.close()
    return 0


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "plot": cmd_plot,
    "compare": cmd_compare,
    "runs": cmd_runs,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PcdForgeError as exc:
        print(f"❌ {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
