"""Tests for coreset selection, baselines and coreset files."""

import numpy as np
import polars as pl
import pytest

from src.scoring import ScoreRecord
from src.selection import (
    Coreset,
    ForgettingLedger,
    SelectorState,
    SelectorStrategy,
    baseline_select,
    coreset_overlap,
    coreset_size,
    coverage_rate,
    full_coverage_blocks,
    read_coreset,
    select_topk,
    update_forgetting_ledger,
    write_coreset,
)
from src.utils.errors import ConfigurationError, FormatError, InputError, StateError


def _frame(scores):
    return pl.DataFrame({"sample_id": list(range(len(scores))), "d_acs": list(scores)})


@pytest.mark.parametrize(
    "fraction, n, expected",
    [(0.3, 10, 3), (0.001, 10, 1), (1.0, 7, 7), (0.29, 100, 29), (0.5, 5, 2)],
)
def test_coreset_size(fraction, n, expected):
    assert coreset_size(fraction, n) == expected


@pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
def test_coreset_size_rejects_bad_fraction(fraction):
    with pytest.raises(ConfigurationError):
        coreset_size(fraction, 10)


def test_select_topk_examples():
    assert select_topk(_frame([0.9, 0.1, 0.5, 0.5]), 0.5, 4).member_ids == (0, 2)
    assert select_topk(_frame([0.2, 0.8, 0.5]), 1.0, 3).member_ids == (1, 2, 0)
    assert select_topk(_frame([0.0, 0.0, 0.0]), 0.01, 3).member_ids == (0,)


def test_select_topk_accepts_records():
    records = [
        ScoreRecord(sample_id=i, epoch=0, d_evs=s, d_ds=s, d_acs=s)
        for i, s in enumerate([0.1, 0.7, 0.3])
    ]
    assert select_topk(records, 0.34, 3).member_ids == (1,)


def test_select_topk_missing_score():
    frame = pl.DataFrame({"sample_id": [0, 2], "d_acs": [0.1, 0.2]})
    with pytest.raises(InputError):
        select_topk(frame, 0.5, 3)


def test_select_topk_matches_brute_force_sort(rng):
    for _ in range(500):
        n = int(rng.integers(1, 1001))
        levels = int(rng.integers(1, 6))
        scores = rng.integers(0, levels, size=n) / 4.0
        fraction = float(rng.uniform(0.01, 1.0))
        k = coreset_size(fraction, n)
        expected = sorted(range(n), key=lambda i: (-scores[i], i))[:k]
        assert list(select_topk(_frame(scores), fraction, n).member_ids) == expected


def test_coreset_rejects_duplicates():
    with pytest.raises(InputError):
        Coreset(epoch_created=0, member_ids=(1, 1), fraction=0.5, strategy="acs")


def test_coreset_overlap():
    a = Coreset(epoch_created=0, member_ids=(1, 2, 3, 4), fraction=0.4, strategy="acs")
    b = Coreset(epoch_created=5, member_ids=(3, 4, 5, 6), fraction=0.4, strategy="acs")
    assert coreset_overlap(a, b) == 50.0
    assert coreset_overlap(a, a) == 100.0
    with pytest.raises(InputError):
        coreset_overlap(a, Coreset(epoch_created=0, member_ids=(1,), fraction=0.1, strategy="x"))


def test_coreset_overlap_matches_set_arithmetic(rng):
    for _ in range(100):
        n = int(rng.integers(2, 200))
        k = int(rng.integers(1, n + 1))
        a = set(rng.choice(n, size=k, replace=False).tolist())
        b = set(rng.choice(n, size=k, replace=False).tolist())
        ca = Coreset(epoch_created=0, member_ids=tuple(a), fraction=k / n, strategy="acs")
        cb = Coreset(epoch_created=0, member_ids=tuple(b), fraction=k / n, strategy="acs")
        assert coreset_overlap(ca, cb) == pytest.approx(100.0 * len(a & b) / k)


def test_pruned_ids_and_coverage():
    c = Coreset(epoch_created=0, member_ids=(4, 0), fraction=0.4, strategy="acs")
    assert c.pruned_ids(5) == [1, 2, 3]
    assert c.training_order_ids() == [0, 4]
    d = Coreset(epoch_created=1, member_ids=(1,), fraction=0.2, strategy="acs")
    assert coverage_rate([c, d], 5) == pytest.approx(0.6)


def test_forgetting_ledger_counts_transitions():
    ledger = update_forgetting_ledger(ForgettingLedger(n=3), [True, True, False])
    assert ledger.events.tolist() == [0, 0, 0]
    ledger = update_forgetting_ledger(ledger, {0: False, 1: True, 2: True})
    assert ledger.events.tolist() == [1, 0, 0]
    ledger = update_forgetting_ledger(ledger, [True, False, False])
    assert ledger.events.tolist() == [1, 1, 1]


def test_forgetting_ledger_rejects_unknown_ids():
    with pytest.raises(InputError):
        update_forgetting_ledger(ForgettingLedger(n=2), {0: True, 5: False})
    with pytest.raises(InputError):
        update_forgetting_ledger(ForgettingLedger(n=2), [True])


@pytest.mark.parametrize("n, fraction", [(10, 0.3), (100, 0.1), (7, 0.5), (13, 1.0), (5, 0.9)])
def test_full_coverage_blocks_partition_ids(n, fraction):
    blocks = full_coverage_blocks(n, fraction, seed=3)
    flat = np.concatenate(blocks)
    assert sorted(flat.tolist()) == list(range(n))
    assert all(len(block) > 0 for block in blocks)
    assert len(blocks) == min(n, int(np.ceil(1.0 / fraction - 1e-9)))


@pytest.mark.parametrize(
    "n, fraction, sizes",
    [(10, 0.3, [3, 3, 3, 1]), (10, 0.15, [2, 2, 2, 1, 1, 1, 1]), (3, 0.1, [1, 1, 1])],
)
def test_full_coverage_block_sizes(n, fraction, sizes):
    assert [len(b) for b in full_coverage_blocks(n, fraction, seed=0)] == sizes


def test_full_coverage_cycle_length_is_ceil_inverse_fraction():
    n, fraction = 10, 0.15
    picks = [
        baseline_select("full_coverage", SelectorState(n=n, round=r), fraction, seed=2)
        for r in range(8)
    ]
    assert coverage_rate(picks[:7], n) == 1.0
    assert picks[7].member_ids == picks[0].member_ids
    assert len({p.member_ids for p in picks[:7]}) == 7


def test_full_coverage_cycles_through_blocks():
    n, fraction = 20, 0.25
    picks = [
        baseline_select("full_coverage", SelectorState(n=n, round=r), fraction, seed=1)
        for r in range(4)
    ]
    assert coverage_rate(picks, n) == 1.0
    again = baseline_select("full_coverage", SelectorState(n=n, round=4), fraction, seed=1)
    assert again.member_ids == picks[0].member_ids


def test_random_selector_is_seeded_per_round():
    first = baseline_select("random", SelectorState(n=50, round=0), 0.2, seed=8)
    repeat = baseline_select("random", SelectorState(n=50, round=0), 0.2, seed=8)
    later = baseline_select("random", SelectorState(n=50, round=1), 0.2, seed=8)
    assert first.member_ids == repeat.member_ids
    assert first.member_ids != later.member_ids
    assert len(first) == 10


def test_score_based_baselines():
    state = SelectorState(n=4, el2n_scores=np.array([0.1, 0.9, 0.5, 0.2]))
    el2n = baseline_select(SelectorStrategy.EL2N, state, 0.5, 0)
    assert el2n.member_ids == (1, 2)

    ledger = update_forgetting_ledger(ForgettingLedger(n=4), [True, True, True, False])
    ledger = update_forgetting_ledger(ledger, [False, True, False, False])
    forgetting = baseline_select("forgetting", SelectorState(n=4, ledger=ledger), 0.5, 0)
    assert forgetting.member_ids == (0, 2)


def test_fixed_and_full_selectors():
    imported = Coreset(epoch_created=0, member_ids=(2, 0), fraction=0.5, strategy="acs")
    fixed = baseline_select("fixed", SelectorState(n=4, fixed=imported), 0.5, 0, epoch=6)
    assert fixed.member_ids == (2, 0) and fixed.epoch_created == 6
    full = baseline_select("full", SelectorState(n=3), 0.2, 0)
    assert full.member_ids == (0, 1, 2)


@pytest.mark.parametrize("strategy", ["el2n", "forgetting", "fixed"])
def test_baselines_need_their_state(strategy):
    with pytest.raises(StateError):
        baseline_select(strategy, SelectorState(n=4), 0.5, 0)


def test_coreset_file_round_trip(tmp_path):
    c = Coreset(epoch_created=5, member_ids=(9, 1, 4), fraction=0.3, strategy="acs", seed=42)
    path = write_coreset(tmp_path / "c.txt", c)
    assert path.read_text().splitlines()[0] == "#coreset v1 strategy=acs S=0.3 epoch=5 seed=42"
    assert read_coreset(path, dataset_size=10) == c


def test_read_coreset_errors(tmp_path):
    no_header = tmp_path / "a.txt"
    no_header.write_text("1\n2\n")
    with pytest.raises(FormatError):
        read_coreset(no_header)

    bad_id = tmp_path / "b.txt"
    bad_id.write_text("#coreset v1 strategy=acs S=0.3 epoch=0 seed=1\n3\nx\n")
    with pytest.raises(FormatError) as err:
        read_coreset(bad_id)
    assert err.value.offset == len("#coreset v1 strategy=acs S=0.3 epoch=0 seed=1\n3\n")

    out_of_range = tmp_path / "c.txt"
    out_of_range.write_text("#coreset v1 strategy=acs S=0.3 epoch=0 seed=1\n3\n12\n")
    with pytest.raises(InputError):
        read_coreset(out_of_range, dataset_size=10)


def test_read_coreset_rejects_duplicate_ids(tmp_path):
    header = "#coreset v1 strategy=acs S=0.3 epoch=0 seed=1\n"
    path = tmp_path / "dup.txt"
    path.write_text(header + "4\n7\n4\n")
    with pytest.raises(FormatError) as err:
        read_coreset(path, dataset_size=10)
    assert err.value.offset == len(header + "4\n7\n")
    assert "duplicate sample id 4" in str(err.value)
