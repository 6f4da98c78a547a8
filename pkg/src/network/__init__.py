"""Network package: MLP classifier with manual backpropagation."""

from .mlp import (
    CheckpointHeader,
    ForwardTrace,
    MLP,
    Mode,
    evaluate,
    init_model,
    load_model,
    save_model,
)
from .training import EpochStats, train_epoch

__all__ = [
    "CheckpointHeader",
    "ForwardTrace",
    "MLP",
    "Mode",
    "evaluate",
    "init_model",
    "load_model",
    "save_model",
    "EpochStats",
    "train_epoch",
]
