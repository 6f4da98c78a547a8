"""Summaries of run outputs: score histograms and timing composition."""

from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import polars as pl

from ..scoring import MAX_SCORE
from ..utils.errors import InputError


def load_score_dump(path: Union[str, Path]) -> pl.DataFrame:
    """Read a scores_epoch<t>.csv dump."""
    return pl.read_csv(
        path,
        schema_overrides={
            "epoch": pl.Int64,
            "sample_id": pl.Int64,
            "d_evs": pl.Float64,
            "d_ds": pl.Float64,
            "d_acs": pl.Float64,
        },
    )


def export_score_histogram(
    scores: pl.DataFrame,
    epoch: int,
    bins: int = 20,
    column: str = "d_ds",
    path: Optional[Union[str, Path]] = None,
) -> pl.DataFrame:
    """
    Fixed-width histogram of one score column over [0, sqrt(2)].

    Args:
        scores: Score dump (one or more epochs).
        epoch: Epoch to histogram.
        bins: Number of equal-width bins.
        column: d_evs, d_ds or d_acs.
        path: Optional CSV destination.

    Returns:
        DataFrame with columns bin, bin_left, bin_right, count.
    """
    if bins < 1:
        raise InputError(f"bins must be >= 1, got {bins}")
    if column not in ("d_evs", "d_ds", "d_acs"):
        raise InputError(f"unknown score column {column!r}")
    values = scores.filter(pl.col("epoch") == epoch)[column].to_numpy()
    if values.size == 0:
        raise InputError(f"score dump has no rows for epoch {epoch}")

    counts, edges = np.histogram(np.clip(values, 0.0, MAX_SCORE), bins=bins, range=(0.0, MAX_SCORE))
    table = pl.DataFrame(
        {
            "bin": np.arange(bins, dtype=np.int64),
            "bin_left": edges[:-1],
            "bin_right": edges[1:],
            "count": counts.astype(np.int64),
        }
    )
    if path is not None:
        table.write_csv(path)
    return table


def timing_breakdown(metrics: pl.DataFrame) -> Dict[str, float]:
    """
    Total, selection and training seconds of a completed run.

    Selection covers scoring, sorting and any baseline early training;
    the total also includes evaluation and bookkeeping.
    """
    totals = metrics.select(
        pl.col("epoch_time_s").sum().alias("total"),
        pl.col("selection_time_s").sum().alias("selection"),
        pl.col("training_time_s").sum().alias("training"),
    ).row(0, named=True)
    return {key: float(value) for key, value in totals.items()}
