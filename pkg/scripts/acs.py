"""
Command-line entry point for adaptive coreset selection QAT.

Verbs: train-teacher, run, sweep, overlap, histogram.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from src.data_loader import load_split
from src.distillation import train_teacher
from src.experiment import (
    RunConfig,
    export_score_histogram,
    load_run_config,
    load_score_dump,
    run_qat,
    run_sweep,
    timing_breakdown,
)
from src.network import evaluate, save_model
from src.selection import coreset_overlap, read_coreset
from src.utils.config import get_settings
from src.utils.errors import ACSError


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--fraction", type=float, help="Coreset fraction S")
    parser.add_argument("--interval", type=int, help="Selection interval R")
    parser.add_argument("--strategy", help="Annealing strategy for beta(t)")
    parser.add_argument(
        "--selector", help="acs, random, el2n, forgetting, full_coverage, fixed, full"
    )
    parser.add_argument("--noise", type=float, help="Label-noise fraction")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--no-kd", action="store_true", help="Disable distillation (EVS only)")
    parser.add_argument(
        "--recalibrate-every", type=int, help="Re-derive weight scales every N epochs"
    )
    parser.add_argument("--out", type=Path, help="Output directory")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config)
    out = args.out or config.output_dir or Path(get_settings().output_dir)
    return config.with_overrides(
        fraction=args.fraction,
        interval=args.interval,
        strategy=args.strategy,
        selector=args.selector,
        noise=args.noise,
        seed=args.seed,
        kd=False if args.no_kd else None,
        recalibrate_every=args.recalibrate_every,
        output_dir=out,
    )


def cmd_train_teacher(args: argparse.Namespace) -> None:
    """Train and save the full-precision teacher on the clean training labels."""
    config = _config_from_args(args)
    split = load_split(config.dataset)
    train = split.train
    arch = config.arch_for(train.input_dim, train.num_classes)

    print("\n" + "=" * 70)
    print("Training Full-Precision Teacher")
    print("=" * 70)
    teacher = train_teacher(
        arch,
        train,
        epochs=config.teacher_epochs,
        lr=config.teacher_lr,
        seed=config.seed,
        batch_size=config.batch_size,
        weight_decay=config.weight_decay,
    )
    test_acc = evaluate(teacher, split.test.features, split.test.labels, mode="fp")
    path = save_model(
        teacher, config.output_dir / f"teacher{get_settings().checkpoint_suffix}", role="teacher"
    )
    print(f"✓ Teacher saved to {path} (test accuracy {test_acc:.4f})")


def cmd_run(args: argparse.Namespace) -> None:
    """Run one QAT configuration."""
    config = _config_from_args(args)
    print("\n" + "=" * 70)
    print(f"QAT run: selector={config.selector.value} S={config.fraction} R={config.interval}")
    print("=" * 70)
    result = run_qat(config)
    timing = timing_breakdown(result.metrics)
    print(f"✓ Final test accuracy: {result.final_test_acc:.4f}")
    print(
        f"  Time: total={timing['total']:.2f}s selection={timing['selection']:.2f}s "
        f"training={timing['training']:.2f}s"
    )


def cmd_sweep(args: argparse.Namespace) -> None:
    """Sweep one axis of the configuration."""
    config = _config_from_args(args)
    values: List = args.values
    if args.axis == "S":
        values = [float(v) for v in values]
    elif args.axis == "R":
        values = [int(v) for v in values]
    summary = run_sweep(
        config,
        args.axis,
        values,
        derive_seeds=not args.shared_seed,
        workers=args.workers,
        output_dir=config.output_dir,
    )
    print(summary)


def cmd_overlap(args: argparse.Namespace) -> None:
    """Print the overlap percentage of two coreset files."""
    a = read_coreset(args.a)
    b = read_coreset(args.b)
    print(f"{coreset_overlap(a, b):.2f}")


def cmd_histogram(args: argparse.Namespace) -> None:
    """Write a histogram CSV from a score dump."""
    scores = load_score_dump(args.scores)
    out = args.out or args.scores.with_name(f"histogram_{args.column}_epoch{args.epoch}.csv")
    export_score_histogram(scores, args.epoch, bins=args.bins, column=args.column, path=out)
    print(f"✓ Histogram written to {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quantization-aware training with adaptive coreset selection"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    teacher = sub.add_parser("train-teacher", help="Train the full-precision teacher")
    _add_overrides(teacher)
    teacher.set_defaults(func=cmd_train_teacher)

    run = sub.add_parser("run", help="Run QAT with coreset selection")
    _add_overrides(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="Sweep one configuration axis")
    _add_overrides(sweep)
    sweep.add_argument("--axis", required=True, choices=["S", "R", "strategy", "selector"])
    sweep.add_argument("--values", required=True, nargs="+")
    sweep.add_argument("--workers", type=int, help="Worker processes")
    sweep.add_argument(
        "--shared-seed", action="store_true", help="Use the base seed for every child run"
    )
    sweep.set_defaults(func=cmd_sweep)

    overlap = sub.add_parser("overlap", help="Overlap percentage of two coresets")
    overlap.add_argument("a", type=Path)
    overlap.add_argument("b", type=Path)
    overlap.set_defaults(func=cmd_overlap)

    histogram = sub.add_parser("histogram", help="Histogram of a score dump")
    histogram.add_argument("--scores", type=Path, required=True)
    histogram.add_argument("--epoch", type=int, required=True)
    histogram.add_argument("--bins", type=int, default=20)
    histogram.add_argument("--column", default="d_ds", choices=["d_evs", "d_ds", "d_acs"])
    histogram.add_argument("--out", type=Path)
    histogram.set_defaults(func=cmd_histogram)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ACSError as e:
        print(e.one_line(), file=sys.stderr)
        return 2
    except Exception as e:
        message = " ".join(str(e).split())
        print(f"error={type(e).__name__} message={message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
