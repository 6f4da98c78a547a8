"""Scoring package: EVS, DS, annealing and the combined ACS score."""

from .scores import (
    MAX_SCORE,
    SCORE_COLUMNS,
    AnnealingStrategy,
    ScoreRecord,
    acs_score,
    beta,
    compute_scores,
    ds,
    evs,
    grad_norm_oracle,
    records_to_frame,
    spearman_rank_correlation,
)

__all__ = [
    "MAX_SCORE",
    "SCORE_COLUMNS",
    "AnnealingStrategy",
    "ScoreRecord",
    "acs_score",
    "beta",
    "compute_scores",
    "ds",
    "evs",
    "grad_norm_oracle",
    "records_to_frame",
    "spearman_rank_correlation",
]
