"""Top-S% selection and baseline selectors."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import polars as pl

from ..scoring import ScoreRecord, records_to_frame
from ..utils.errors import InputError, StateError
from ..utils.seeding import Stream, rng_for
from .coreset import Coreset, coreset_size


class SelectorStrategy(str, Enum):
    """Selectors available to a run."""

    ACS = "acs"
    RANDOM = "random"
    EL2N = "el2n"
    FORGETTING = "forgetting"
    FULL_COVERAGE = "full_coverage"
    FIXED = "fixed"
    FULL = "full"

    @property
    def needs_early_training(self) -> bool:
        return self in (SelectorStrategy.EL2N, SelectorStrategy.FORGETTING)


def select_topk(
    scores: Union[pl.DataFrame, Sequence[ScoreRecord]],
    fraction: float,
    n: int,
    epoch: int = 0,
    strategy: str = "acs",
    seed: int = 0,
    score_column: str = "d_acs",
) -> Coreset:
    """
    Keep the max(1, floor(S*N)) highest-scoring samples.

    Ties are broken by ascending sample id.

    Args:
        scores: Score table (sample_id plus ``score_column``) or ScoreRecords.
        fraction: Coreset fraction S in (0, 1].
        n: Dataset size; every id 0..n-1 needs exactly one score.
        epoch: Epoch recorded on the coreset.
        strategy: Strategy tag recorded on the coreset.
        seed: Seed recorded on the coreset.
        score_column: Column ranked in descending order.

    Returns:
        Coreset with members in rank order.
    """
    frame = scores if isinstance(scores, pl.DataFrame) else records_to_frame(list(scores))
    k = coreset_size(fraction, n)
    ids = frame["sample_id"]
    if len(frame) != n or ids.n_unique() != n or ids.min() != 0 or ids.max() != n - 1:
        raise InputError(f"expected exactly one score for each of {n} sample ids")
    ranked = frame.sort([score_column, "sample_id"], descending=[True, False]).head(k)
    return Coreset(
        epoch_created=epoch,
        member_ids=tuple(ranked["sample_id"].to_list()),
        fraction=fraction,
        strategy=strategy,
        seed=seed,
    )


@dataclass
class ForgettingLedger:
    """Previous correctness bit and forgetting-event count per sample id."""

    n: int
    previous: Optional[np.ndarray] = None
    events: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.events is None:
            self.events = np.zeros(self.n, dtype=np.int64)


def update_forgetting_ledger(
    ledger: ForgettingLedger, correct: Union[Mapping[int, bool], Sequence[bool], np.ndarray]
) -> ForgettingLedger:
    """
    Count a forgetting event wherever a sample goes from correct to incorrect.

    Args:
        ledger: Current ledger (not modified).
        correct: Either one bit per tracked id in id order, or a mapping id -> bit.

    Returns:
        New ledger storing the current bits.
    """
    if isinstance(correct, Mapping):
        unknown = [i for i in correct if not 0 <= int(i) < ledger.n]
        if unknown:
            raise InputError(f"unknown sample ids in correctness update: {unknown[:5]}")
        if len(correct) != ledger.n:
            raise InputError(f"expected a bit for each of {ledger.n} samples, got {len(correct)}")
        bits = np.zeros(ledger.n, dtype=bool)
        for i, bit in correct.items():
            bits[int(i)] = bool(bit)
    else:
        bits = np.asarray(correct, dtype=bool)
        if bits.shape != (ledger.n,):
            raise InputError(f"expected {ledger.n} correctness bits, got shape {bits.shape}")

    events = ledger.events.copy()
    if ledger.previous is not None:
        events += (ledger.previous & ~bits).astype(np.int64)
    return ForgettingLedger(n=ledger.n, previous=bits.copy(), events=events)


@dataclass
class SelectorState:
    """Inputs a baseline selector may need at one selection round."""

    n: int
    round: int = 0
    el2n_scores: Optional[np.ndarray] = None
    ledger: Optional[ForgettingLedger] = None
    fixed: Optional[Coreset] = None


def full_coverage_blocks(n: int, fraction: float, seed: int) -> list:
    """
    Seeded random partition of 0..n-1 into ceil(1/S) non-empty blocks.

    Blocks take ceil(n / ceil(1/S)) ids until the remainder only leaves one id
    for each block still to fill, so trailing blocks may be smaller. With fewer
    than ceil(1/S) samples every block is a single id.
    """
    coreset_size(fraction, n)
    blocks_wanted = min(n, math.ceil(1.0 / fraction - 1e-9))
    block = math.ceil(n / blocks_wanted)
    perm = rng_for(seed, Stream.SELECTOR, 0).permutation(n)
    blocks = []
    start = 0
    for index in range(blocks_wanted):
        size = min(block, n - start - (blocks_wanted - index - 1))
        blocks.append(perm[start : start + size])
        start += size
    return blocks


def _rank_by(values: np.ndarray, fraction: float, epoch: int, tag: str, seed: int) -> Coreset:
    frame = pl.DataFrame({"sample_id": np.arange(len(values)), "score": values})
    return select_topk(frame, fraction, len(values), epoch, tag, seed, score_column="score")


def baseline_select(
    strategy: Union[SelectorStrategy, str],
    state: SelectorState,
    fraction: float,
    seed: int,
    epoch: int = 0,
) -> Coreset:
    """
    Coreset from one of the baseline selectors.

    Args:
        strategy: random, el2n, forgetting, full_coverage, fixed or full.
        state: Round counter and strategy-specific inputs.
        fraction: Coreset fraction S.
        seed: Selector seed.
        epoch: Epoch recorded on the coreset.

    Returns:
        The selected Coreset; a pure function of (state, seed).
    """
    strategy = SelectorStrategy(strategy)
    n = state.n
    if strategy is SelectorStrategy.RANDOM:
        k = coreset_size(fraction, n)
        rng = rng_for(seed, Stream.SELECTOR, state.round + 1)
        ids = rng.choice(n, size=k, replace=False)
        return Coreset(
            epoch_created=epoch,
            member_ids=tuple(int(i) for i in ids),
            fraction=fraction,
            strategy=strategy.value,
            seed=seed,
        )
    if strategy is SelectorStrategy.EL2N:
        if state.el2n_scores is None:
            raise StateError("el2n selection needs scores from the early-trained model")
        return _rank_by(np.asarray(state.el2n_scores), fraction, epoch, strategy.value, seed)
    if strategy is SelectorStrategy.FORGETTING:
        if state.ledger is None or state.ledger.previous is None:
            raise StateError("forgetting selection needs a ledger from early training")
        return _rank_by(
            state.ledger.events.astype(np.float64), fraction, epoch, strategy.value, seed
        )
    if strategy is SelectorStrategy.FULL_COVERAGE:
        blocks = full_coverage_blocks(n, fraction, seed)
        block = blocks[state.round % len(blocks)]
        return Coreset(
            epoch_created=epoch,
            member_ids=tuple(int(i) for i in block),
            fraction=fraction,
            strategy=strategy.value,
            seed=seed,
        )
    if strategy is SelectorStrategy.FIXED:
        if state.fixed is None:
            raise StateError("fixed selection needs an imported coreset")
        return state.fixed.model_copy(update={"epoch_created": epoch})
    if strategy is SelectorStrategy.FULL:
        return Coreset(
            epoch_created=epoch,
            member_ids=tuple(range(n)),
            fraction=1.0,
            strategy=strategy.value,
            seed=seed,
        )
    raise StateError(f"{strategy.value} is not a baseline selector")


def correctness_bits(predictions: np.ndarray, labels: Iterable[int]) -> np.ndarray:
    """Per-sample correctness of argmax predictions."""
    return np.argmax(predictions, axis=1) == np.asarray(list(labels))
