"""Per-sample importance scores for quantization-aware coreset selection."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
import polars as pl

from ..network import MLP, Mode
from ..utils.errors import DimensionError, InputError

SCORE_COLUMNS = ["epoch", "sample_id", "d_evs", "d_ds", "d_acs"]
MAX_SCORE = math.sqrt(2.0)


class AnnealingStrategy(str, Enum):
    """How the EVS/DS mixing coefficient evolves over training."""

    FIXED = "fixed"
    LINEAR = "linear"
    SQRT = "sqrt"
    QUADRATIC = "quadratic"
    COSINE = "cosine"
    EVS_ONLY = "evs_only"
    DS_ONLY = "ds_only"

    @property
    def needs_ds(self) -> bool:
        return self is not AnnealingStrategy.EVS_ONLY


@dataclass(frozen=True)
class ScoreRecord:
    """Scores of one sample at one selection epoch."""

    sample_id: int
    epoch: int
    d_evs: float
    d_ds: float
    d_acs: float


def records_to_frame(records: Sequence[ScoreRecord]) -> pl.DataFrame:
    """Tabulate score records with the dump column order."""
    return pl.DataFrame(
        {
            "epoch": [r.epoch for r in records],
            "sample_id": [r.sample_id for r in records],
            "d_evs": [r.d_evs for r in records],
            "d_ds": [r.d_ds for r in records],
            "d_acs": [r.d_acs for r in records],
        },
        schema={
            "epoch": pl.Int64,
            "sample_id": pl.Int64,
            "d_evs": pl.Float64,
            "d_ds": pl.Float64,
            "d_acs": pl.Float64,
        },
    )


def _row_distance(a, b, what: str):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"{what}: shape {a.shape} does not match {b.shape}")
    dist = np.linalg.norm(a - b, axis=-1)
    return float(dist) if dist.ndim == 0 else dist


def evs(p_quant, y):
    """Error-vector score ||p - y||_2 against the one-hot label (row-wise for batches)."""
    return _row_distance(p_quant, y, "evs")


def ds(p_quant, p_teacher):
    """Disagreement score ||p - p_T||_2 between student and teacher outputs."""
    return _row_distance(p_quant, p_teacher, "ds")


def beta(
    t: float, total_epochs: int, strategy: AnnealingStrategy = AnnealingStrategy.COSINE
) -> float:
    """
    Annealing coefficient weighting EVS against DS at epoch t.

    Args:
        t: Current epoch, 0 <= t <= total_epochs.
        total_epochs: Total epochs E >= 1.
        strategy: One of the seven schedules.

    Returns:
        Coefficient in [0, 1].
    """
    strategy = AnnealingStrategy(strategy)
    if total_epochs < 1:
        raise InputError(f"total epochs must be >= 1, got {total_epochs}")
    if t < 0 or t > total_epochs:
        raise InputError(f"epoch {t} outside [0, {total_epochs}]")
    ratio = t / total_epochs
    if strategy is AnnealingStrategy.COSINE:
        # cos(pi/2) evaluates to 6e-17 rather than 0
        value = 0.0 if t == total_epochs else math.cos(ratio * math.pi / 2.0)
    elif strategy is AnnealingStrategy.FIXED:
        value = 0.5
    elif strategy is AnnealingStrategy.LINEAR:
        value = 1.0 - ratio
    elif strategy is AnnealingStrategy.SQRT:
        value = 1.0 - math.sqrt(ratio)
    elif strategy is AnnealingStrategy.QUADRATIC:
        value = 1.0 - ratio**2
    elif strategy is AnnealingStrategy.EVS_ONLY:
        value = 1.0
    else:
        value = 0.0
    return value


def acs_score(d_evs, d_ds, beta_t: float):
    """beta * d_evs + (1 - beta) * d_ds."""
    if not 0.0 <= beta_t <= 1.0:
        raise InputError(f"beta must lie in [0, 1], got {beta_t}")
    combined = beta_t * np.asarray(d_evs, dtype=np.float64) + (1.0 - beta_t) * np.asarray(
        d_ds, dtype=np.float64
    )
    return float(combined) if combined.ndim == 0 else combined


def compute_scores(
    model: MLP,
    features: np.ndarray,
    one_hot: np.ndarray,
    epoch: int,
    total_epochs: int,
    strategy: AnnealingStrategy,
    teacher_probs: Optional[np.ndarray] = None,
    mode: Mode = "quant",
    batch_size: int = 1024,
) -> pl.DataFrame:
    """
    Score every sample with the current model in evaluation mode.

    Args:
        model: Current quantized student.
        features: All training feature rows (row index = sample id).
        one_hot: One-hot labels, same row order.
        epoch: Selection epoch t.
        total_epochs: Total epochs E for the annealing schedule.
        strategy: Annealing strategy.
        teacher_probs: Teacher outputs per sample; required unless the strategy is evs_only.
        mode: Forward mode of the student.
        batch_size: Forward batch size.

    Returns:
        DataFrame with columns epoch, sample_id, d_evs, d_ds, d_acs.
    """
    strategy = AnnealingStrategy(strategy)
    n = len(features)
    if n == 0:
        raise InputError("cannot score an empty dataset")
    probs = np.concatenate(
        [model.predict(features[s : s + batch_size], mode) for s in range(0, n, batch_size)]
    )

    d_evs = np.atleast_1d(evs(probs, one_hot))
    if teacher_probs is not None:
        d_ds = np.atleast_1d(ds(probs, teacher_probs))
    elif strategy.needs_ds:
        raise InputError(f"strategy {strategy.value} needs teacher predictions for DS")
    else:
        d_ds = np.zeros(n)

    b = beta(epoch, total_epochs, strategy)
    return pl.DataFrame(
        {
            "epoch": np.full(n, epoch, dtype=np.int64),
            "sample_id": np.arange(n, dtype=np.int64),
            "d_evs": d_evs,
            "d_ds": d_ds,
            "d_acs": acs_score(d_evs, d_ds, b),
        }
    )


def grad_norm_oracle(model: MLP, x, y, mode: Mode = "quant") -> float:
    """
    Exact norm of one sample's cross-entropy gradient over all weights.

    Args:
        model: Model whose (straight-through) gradient is measured.
        x: Single feature row.
        y: Target row (one-hot label).
        mode: Forward mode.

    Returns:
        Euclidean norm of the full per-sample gradient.
    """
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    y = np.asarray(y, dtype=np.float64).reshape(1, -1)
    _, trace = model.forward(x, mode)
    return model.backward(trace, y).norm()


def spearman_rank_correlation(a, b) -> float:
    """Spearman correlation of two equally long score vectors."""
    frame = pl.DataFrame(
        {"a": np.asarray(a, dtype=np.float64), "b": np.asarray(b, dtype=np.float64)}
    )
    return float(frame.select(pl.corr("a", "b", method="spearman")).item())
