"""
Desk-scale robustness and overhead studies.

noise:    ACS vs random vs full data under 10% label noise (recall and accuracy).
overhead: selection vs training time across coreset fractions.
"""

import argparse
from pathlib import Path

import polars as pl

from src.data_loader import load_split
from src.distillation import train_teacher
from src.experiment import load_run_config, run_qat, timing_breakdown


def noise_study(config_path: Path, seeds: list, fraction: float, noise: float) -> pl.DataFrame:
    """Final-round recall and test accuracy per selector and seed."""
    base = load_run_config(config_path).with_overrides(noise=noise, fraction=fraction)
    split = load_split(base.dataset, verbose=False)
    rows = []
    for seed in seeds:
        for selector in ("acs", "random", "full"):
            result = run_qat(
                base.with_overrides(seed=seed, selector=selector), split=split, verbose=False
            )
            recall = result.metrics.filter(pl.col("noisy_recall").is_not_null())["noisy_recall"]
            rows.append(
                {
                    "seed": seed,
                    "selector": selector,
                    "final_recall": float(recall[-1]) if len(recall) else None,
                    "final_test_acc": result.final_test_acc,
                }
            )
            print(f"  seed={seed} selector={selector}: acc={result.final_test_acc:.4f}")
    table = pl.DataFrame(rows)
    print(
        table.group_by("selector")
        .agg(
            pl.col("final_test_acc").mean().alias("mean_acc"),
            pl.col("final_recall").mean().alias("mean_recall"),
        )
        .sort("selector")
    )
    return table


def overhead_study(config_path: Path, fractions: list, repeats: int = 3) -> pl.DataFrame:
    """
    Selection and training seconds for each coreset fraction at a fixed seed.

    Each fraction runs ``repeats`` times and keeps the fastest timing of each
    column; the teacher is trained once and shared by every run.
    """
    base = load_run_config(config_path)
    split = load_split(base.dataset, verbose=False)
    teacher = None
    if base.needs_teacher and base.teacher_checkpoint is None:
        arch = base.arch_for(split.train.input_dim, split.train.num_classes)
        teacher = train_teacher(
            arch,
            split.train,
            epochs=base.teacher_epochs,
            lr=base.teacher_lr,
            seed=base.seed,
            batch_size=base.batch_size,
            weight_decay=base.weight_decay,
            verbose=False,
        )
    rows = []
    for fraction in fractions:
        config = base.with_overrides(fraction=fraction)
        timings = [
            timing_breakdown(run_qat(config, split=split, teacher=teacher, verbose=False).metrics)
            for _ in range(repeats)
        ]
        rows.append(
            {"fraction": fraction, **{key: min(t[key] for t in timings) for key in timings[0]}}
        )
    table = pl.DataFrame(rows)
    print(table)
    spread = (table["selection"].max() - table["selection"].min()) / table["selection"].min()
    print(f"  selection time spread across fractions: {spread:.1%}")
    return table


def main():
    """Run the requested study and write its table."""
    parser = argparse.ArgumentParser(description="Desk-scale ACS studies")
    parser.add_argument("study", choices=["noise", "overhead"])
    parser.add_argument("--config", type=Path)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--fraction", type=float, default=0.3)
    parser.add_argument("--noise", type=float, default=0.1)
    parser.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.5, 0.9])
    parser.add_argument("--repeats", type=int, default=3, help="Timed runs per fraction")
    parser.add_argument("--out", type=Path, default=Path("runs") / "study.csv")
    args = parser.parse_args()

    print("\n" + "=" * 70)
    print(f"Study: {args.study}")
    print("=" * 70)
    if args.study == "noise":
        table = noise_study(args.config, args.seeds, args.fraction, args.noise)
    else:
        table = overhead_study(args.config, args.fractions, args.repeats)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    table.write_csv(args.out)
    print(f"✓ Results written to {args.out}")


if __name__ == "__main__":
    main()
