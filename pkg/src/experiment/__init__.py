"""Experiment package: QAT runs with coreset reselection, sweeps and reporting."""

from .config import RunConfig, load_run_config, save_run_config
from .reporting import export_score_histogram, load_score_dump, timing_breakdown
from .runner import (
    DETERMINISTIC_COLUMNS,
    DETERMINISTIC_METRICS_FILE,
    METRICS_SCHEMA,
    TIMING_COLUMNS,
    QATRunner,
    RunResult,
    run_qat,
)
from .sweep import SWEEP_AXES, run_sweep

__all__ = [
    "RunConfig",
    "load_run_config",
    "save_run_config",
    "export_score_histogram",
    "load_score_dump",
    "timing_breakdown",
    "DETERMINISTIC_COLUMNS",
    "DETERMINISTIC_METRICS_FILE",
    "METRICS_SCHEMA",
    "TIMING_COLUMNS",
    "QATRunner",
    "RunResult",
    "run_qat",
    "SWEEP_AXES",
    "run_sweep",
]
