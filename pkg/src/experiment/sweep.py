"""One-axis parameter sweeps over run configurations."""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import polars as pl

from ..data_loader import DataSplit, load_split
from ..utils.config import get_settings
from ..utils.errors import ACSError, ConfigurationError
from ..utils.seeding import Stream, derive_seed
from .config import RunConfig
from .reporting import timing_breakdown
from .runner import run_qat

SWEEP_AXES = {
    "S": "fraction",
    "R": "interval",
    "strategy": "strategy",
    "selector": "selector",
}

SUMMARY_SCHEMA = {
    "value": pl.Utf8,
    "seed": pl.Int64,
    "status": pl.Utf8,
    "final_test_acc": pl.Float64,
    "total_time_s": pl.Float64,
    "selection_time_s": pl.Float64,
    "training_time_s": pl.Float64,
    "error": pl.Utf8,
}


def _label(value: Any) -> str:
    return str(getattr(value, "value", value))


def _child_config(
    base: RunConfig,
    axis: str,
    index: int,
    value: Any,
    derive_seeds: bool,
    output_dir: Optional[Path],
) -> RunConfig:
    seed = derive_seed(base.seed, Stream.SWEEP, index) if derive_seeds else base.seed
    child_dir = output_dir / f"{axis}={_label(value)}" if output_dir is not None else None
    return base.with_overrides(**{SWEEP_AXES[axis]: value, "seed": seed, "output_dir": child_dir})


def _failed_row(seed: int, error: Exception) -> Dict[str, Any]:
    message = (
        error.one_line()
        if isinstance(error, ACSError)
        else f"error={type(error).__name__} message={error}"
    )
    return {
        "seed": seed,
        "status": "failed",
        "final_test_acc": None,
        "total_time_s": None,
        "selection_time_s": None,
        "training_time_s": None,
        "error": message,
    }


def _run_child(config: RunConfig, split: Optional[DataSplit], verbose: bool) -> Dict[str, Any]:
    try:
        result = run_qat(config, split=split, verbose=verbose)
    except Exception as e:
        return _failed_row(config.seed, e)
    timing = timing_breakdown(result.metrics)
    return dict(
        seed=config.seed,
        status="ok",
        final_test_acc=result.final_test_acc,
        total_time_s=timing["total"],
        selection_time_s=timing["selection"],
        training_time_s=timing["training"],
        error=None,
    )


def run_sweep(
    base: RunConfig,
    axis: str,
    values: Sequence[Any],
    derive_seeds: bool = True,
    workers: Optional[int] = None,
    output_dir: Optional[Path] = None,
    verbose: Optional[bool] = None,
) -> pl.DataFrame:
    """
    Run one QAT configuration per value of ``axis``.

    Args:
        base: Configuration shared by every child run.
        axis: "S", "R", "strategy" or "selector".
        values: Values assigned to the axis.
        derive_seeds: Give each child its own seed derived from the base seed;
            False keeps the base seed so runs differ only in the swept value.
        workers: Worker processes (default from settings); 1 runs in-process.
        output_dir: Root directory; each child writes into ``<axis>=<value>/``
            and the summary goes to ``summary.csv``.
        verbose: Print progress.

    Returns:
        Summary table with one row per value. Failed children are recorded and
        the sweep continues.
    """
    settings = get_settings()
    verbose = settings.verbose if verbose is None else verbose
    workers = workers or settings.sweep_workers
    output_dir = Path(output_dir) if output_dir is not None else None
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; expected one of {list(SWEEP_AXES)}")

    # every child sees the same data
    split = load_split(base.dataset, verbose=verbose)

    if verbose:
        print("\n" + "=" * 70)
        print(f"Sweep over {axis}: {', '.join(_label(v) for v in values)}")
        print("=" * 70)

    rows: List[Optional[Dict[str, Any]]] = [None] * len(values)
    children = {}
    for index, value in enumerate(values):
        try:
            children[index] = _child_config(base, axis, index, value, derive_seeds, output_dir)
        except ACSError as e:
            rows[index] = _failed_row(base.seed, e)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                index: pool.submit(_run_child, child, split, False)
                for index, child in children.items()
            }
            for index, future in futures.items():
                rows[index] = future.result()
    else:
        for index, child in children.items():
            rows[index] = _run_child(child, split, verbose)

    for value, row in zip(values, rows):
        row["value"] = _label(value)
        if verbose:
            mark = "✓" if row["status"] == "ok" else "✗"
            print(f"{mark} {axis}={row['value']}: {row['status']}")

    summary = pl.DataFrame(rows, schema=SUMMARY_SCHEMA)
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)
        summary.write_csv(output_dir / "summary.csv")
    return summary
