"""Selection package: adaptive top-S% selection and baseline selectors."""

from .coreset import (
    Coreset,
    coreset_overlap,
    coreset_size,
    coverage_rate,
    read_coreset,
    write_coreset,
)
from .selectors import (
    ForgettingLedger,
    SelectorState,
    SelectorStrategy,
    baseline_select,
    correctness_bits,
    full_coverage_blocks,
    select_topk,
    update_forgetting_ledger,
)

__all__ = [
    "Coreset",
    "coreset_overlap",
    "coreset_size",
    "coverage_rate",
    "read_coreset",
    "write_coreset",
    "ForgettingLedger",
    "SelectorState",
    "SelectorStrategy",
    "baseline_select",
    "correctness_bits",
    "full_coverage_blocks",
    "select_topk",
    "update_forgetting_ledger",
]
