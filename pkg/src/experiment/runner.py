"""End-to-end quantization-aware training with adaptive coreset selection."""

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import polars as pl

from ..data_loader import DataSplit, Dataset, inject_label_noise, load_split, noisy_recall
from ..distillation import TeacherCache, train_teacher
from ..network import MLP, evaluate, init_model, load_model, save_model, train_epoch
from ..scoring import compute_scores, evs
from ..selection import (
    Coreset,
    ForgettingLedger,
    SelectorState,
    SelectorStrategy,
    baseline_select,
    coreset_size,
    correctness_bits,
    full_coverage_blocks,
    read_coreset,
    select_topk,
    update_forgetting_ledger,
    write_coreset,
)
from ..utils.config import get_settings
from ..utils.errors import RunError
from ..utils.seeding import Stream, derive_seed, rng_for
from .config import RunConfig, save_run_config

METRICS_SCHEMA = {
    "epoch": pl.Int64,
    "phase": pl.Utf8,
    "train_loss": pl.Float64,
    "train_acc": pl.Float64,
    "test_acc": pl.Float64,
    "coreset_size": pl.Int64,
    "noisy_recall": pl.Float64,
    "selection_time_s": pl.Float64,
    "training_time_s": pl.Float64,
    "epoch_time_s": pl.Float64,
}
TIMING_COLUMNS = ["selection_time_s", "training_time_s", "epoch_time_s"]
DETERMINISTIC_COLUMNS = [c for c in METRICS_SCHEMA if c not in TIMING_COLUMNS]
# metrics without wall-clock columns; byte-identical across repeated runs
DETERMINISTIC_METRICS_FILE = "metrics_deterministic.csv"


@dataclass
class RunResult:
    """Everything a run produces."""

    config: RunConfig
    metrics: pl.DataFrame
    model: MLP
    coresets: List[Coreset]
    epoch_coresets: List[Coreset]
    scores: Dict[int, pl.DataFrame] = field(default_factory=dict)
    counters: Dict[str, int] = field(default_factory=dict)
    train_data: Optional[Dataset] = None
    teacher: Optional[MLP] = None
    output_dir: Optional[Path] = None

    @property
    def final_test_acc(self) -> float:
        return float(self.metrics["test_acc"][-1])

    def deterministic_metrics(self) -> pl.DataFrame:
        """Metrics without wall-clock columns (identical across repeated runs)."""
        return self.metrics.select(DETERMINISTIC_COLUMNS)


class QATRunner:
    """Periodic coreset reselection inside a QAT loop."""

    def __init__(
        self,
        config: RunConfig,
        split: Optional[DataSplit] = None,
        teacher: Optional[MLP] = None,
        verbose: Optional[bool] = None,
    ):
        """
        Initialize the runner.

        Args:
            config: Validated run configuration.
            split: Pre-loaded data; loaded from ``config.dataset`` when omitted.
            teacher: Pre-trained full-precision teacher to reuse.
            verbose: Print progress; defaults to the ``verbose`` setting.
        """
        self.config = config
        self.split = split
        self.teacher = teacher
        self.verbose = get_settings().verbose if verbose is None else verbose
        self.counters = {"scored_samples": 0, "selection_rounds": 0, "sort_calls": 0}

    def _log(self, message: str) -> None:
        if self.verbose:
            print(message)

    # ------------------------------------------------------------------
    # Setup

    def _prepare_data(self) -> Tuple[DataSplit, DataSplit]:
        """The clean split (teacher training) and the split the student sees."""
        clean = self.split or load_split(self.config.dataset, verbose=self.verbose)
        if self.config.noise <= 0:
            return clean, clean
        train = inject_label_noise(clean.train, self.config.noise, self.config.seed)
        self._log(f"Injected label noise into {len(train.noisy_ids):,} samples")
        return clean, DataSplit(train=train, test=clean.test, source=clean.source)

    def _prepare_teacher(self, train: Dataset, arch: List[int]) -> Optional[MLP]:
        cfg = self.config
        if not cfg.needs_teacher:
            return None
        if self.teacher is not None:
            return self.teacher
        if cfg.teacher_checkpoint is not None:
            self._log(f"Loading teacher from {cfg.teacher_checkpoint}")
            return load_model(cfg.teacher_checkpoint, expected_role="teacher")
        self._log(f"Training full-precision teacher for {cfg.teacher_epochs} epochs")
        return train_teacher(
            arch,
            train,
            epochs=cfg.teacher_epochs,
            lr=cfg.teacher_lr,
            seed=cfg.seed,
            batch_size=cfg.batch_size,
            weight_decay=cfg.weight_decay,
            verbose=self.verbose,
        )

    def _epoch_coreset_size(self, n: int, state: SelectorState) -> int:
        """Samples trained per epoch under the configured selector."""
        cfg = self.config
        if cfg.selector is SelectorStrategy.FULL:
            return n
        if cfg.selector is SelectorStrategy.FIXED:
            return len(state.fixed)
        if cfg.selector is SelectorStrategy.FULL_COVERAGE:
            # leading blocks are the largest
            return len(full_coverage_blocks(n, cfg.fraction, cfg.seed)[0])
        return coreset_size(cfg.fraction, n)

    def _total_epochs(self, n: int, state: SelectorState) -> int:
        cfg = self.config
        if cfg.step_budget is None:
            return cfg.epochs
        steps_per_epoch = math.ceil(self._epoch_coreset_size(n, state) / cfg.batch_size)
        return max(1, math.ceil(cfg.step_budget / steps_per_epoch))

    def _early_training(self, student: MLP, train: Dataset, state: SelectorState) -> None:
        """Train a throwaway copy on all data to feed EL2N / forgetting baselines."""
        cfg = self.config
        early = student.copy()
        ledger = ForgettingLedger(n=len(train))
        targets = train.one_hot
        for epoch in range(cfg.early_epochs):
            order = rng_for(cfg.seed, Stream.EARLY, epoch).permutation(len(train))
            train_epoch(
                early,
                train.features,
                targets,
                train.labels,
                order,
                lr=cfg.lr,
                batch_size=cfg.batch_size,
                mode="quant",
                weight_decay=cfg.weight_decay,
            )
            probs = early.predict(train.features, mode="quant")
            ledger = update_forgetting_ledger(ledger, correctness_bits(probs, train.labels))
        state.ledger = ledger
        state.el2n_scores = evs(early.predict(train.features, mode="quant"), targets)
        self._log(f"Early training for {cfg.selector.value}: {cfg.early_epochs} epochs")

    # ------------------------------------------------------------------
    # Main loop

    def run(self) -> RunResult:
        """
        Execute the configured run.

        Returns:
            RunResult with per-epoch metrics, final model and coreset history.
        """
        cfg = self.config
        out_dir = Path(cfg.output_dir) if cfg.output_dir is not None else None

        clean, split = self._prepare_data()
        train, test = split.train, split.test
        n = len(train)
        arch = cfg.arch_for(train.input_dim, train.num_classes)

        teacher = self._prepare_teacher(clean.train, arch)
        teacher_probs = None
        if teacher is not None:
            cache = TeacherCache(teacher, train)
            cache.warm_up()
            teacher_probs = cache.matrix()

        student = init_model(arch, derive_seed(cfg.seed, Stream.INIT))
        student.configure_quantization(
            cfg.bits_w, cfg.bits_a, cfg.keep_edge_layers_fp, calibration_inputs=train.features
        )

        hard = train.one_hot
        if cfg.kd:
            targets = (1.0 - cfg.kd_mix_lambda) * teacher_probs + cfg.kd_mix_lambda * hard
        else:
            targets = hard

        state = SelectorState(n=n)
        if cfg.selector is SelectorStrategy.FIXED:
            state.fixed = read_coreset(cfg.coreset_path, dataset_size=n)

        total_epochs = self._total_epochs(n, state)
        steps_left = cfg.step_budget
        self._log(
            f"QAT: {total_epochs} epochs, selector={cfg.selector.value}, "
            f"S={cfg.fraction}, R={cfg.interval}, W{cfg.bits_w}/A{cfg.bits_a}"
        )

        rows = []
        history: List[Coreset] = []
        epoch_coresets: List[Coreset] = []
        scores: Dict[int, pl.DataFrame] = {}
        coreset: Optional[Coreset] = None

        for t in range(total_epochs):
            epoch_start = time.perf_counter()
            if cfg.recalibrate_every and t > 0 and t % cfg.recalibrate_every == 0:
                student.recalibrate_weights()

            selected = t % cfg.interval == 0
            sel_start = time.perf_counter()
            if selected:
                coreset, table = self._select(
                    t, total_epochs, student, train, hard, teacher_probs, state
                )
                if table is not None:
                    scores[t] = table
                history.append(coreset)
            selection_time = time.perf_counter() - sel_start if selected else 0.0

            order = rng_for(cfg.seed, Stream.SHUFFLE, t).permutation(
                np.asarray(coreset.training_order_ids(), dtype=np.int64)
            )
            last_good = student.params.copy()
            train_start = time.perf_counter()
            stats = train_epoch(
                student,
                train.features,
                targets,
                train.labels,
                order,
                lr=cfg.lr,
                batch_size=cfg.batch_size,
                mode="quant",
                weight_decay=cfg.weight_decay,
                max_steps=steps_left,
            )
            training_time = time.perf_counter() - train_start
            if not stats.finite:
                raise RunError(
                    f"training loss is not finite at epoch {t}",
                    checkpoint=self._save_last_good(student, last_good, out_dir),
                )
            if steps_left is not None:
                steps_left -= stats.steps

            recall = None
            if selected and train.noisy_ids:
                recall = noisy_recall(coreset.pruned_ids(n), train.noisy_ids)

            rows.append(
                {
                    "epoch": t,
                    "phase": "select" if selected else "train",
                    "train_loss": stats.mean_loss,
                    "train_acc": stats.accuracy,
                    "test_acc": evaluate(student, test.features, test.labels, mode="quant"),
                    "coreset_size": len(coreset),
                    "noisy_recall": recall,
                    "selection_time_s": selection_time,
                    "training_time_s": training_time,
                    "epoch_time_s": time.perf_counter() - epoch_start,
                }
            )
            epoch_coresets.append(coreset)
            self._log(
                f"  Epoch {t + 1}/{total_epochs} [{rows[-1]['phase']}]: "
                f"loss={stats.mean_loss:.4f} train_acc={stats.accuracy:.4f} "
                f"test_acc={rows[-1]['test_acc']:.4f} coreset={len(coreset)}"
            )
            if steps_left is not None and steps_left <= 0:
                break

        result = RunResult(
            config=cfg,
            metrics=pl.DataFrame(rows, schema=METRICS_SCHEMA),
            model=student,
            coresets=history,
            epoch_coresets=epoch_coresets,
            scores=scores,
            counters=dict(self.counters),
            train_data=train,
            teacher=teacher,
            output_dir=out_dir,
        )
        if out_dir is not None:
            self._write_outputs(result, out_dir)
        return result

    def _select(
        self,
        t: int,
        total_epochs: int,
        student: MLP,
        train: Dataset,
        hard: np.ndarray,
        teacher_probs: Optional[np.ndarray],
        state: SelectorState,
    ) -> Tuple[Coreset, Optional[pl.DataFrame]]:
        """Pick the coreset for epoch t; ACS also returns its score table."""
        cfg = self.config
        n = len(train)
        self.counters["selection_rounds"] += 1
        if cfg.selector is SelectorStrategy.ACS:
            table = compute_scores(
                student,
                train.features,
                hard,
                epoch=t,
                total_epochs=total_epochs,
                strategy=cfg.strategy,
                teacher_probs=teacher_probs if cfg.strategy.needs_ds else None,
            )
            self.counters["scored_samples"] += n
            self.counters["sort_calls"] += 1
            coreset = select_topk(table, cfg.fraction, n, epoch=t, strategy="acs", seed=cfg.seed)
            return coreset, table

        if cfg.selector.needs_early_training and state.ledger is None:
            self._early_training(student, train, state)
        if cfg.selector in (SelectorStrategy.EL2N, SelectorStrategy.FORGETTING):
            self.counters["sort_calls"] += 1
        coreset = baseline_select(cfg.selector, state, cfg.fraction, cfg.seed, epoch=t)
        state.round += 1
        return coreset, None

    # ------------------------------------------------------------------
    # Output

    def _save_last_good(self, student: MLP, params, out_dir: Optional[Path]) -> Optional[Path]:
        if out_dir is None:
            return None
        snapshot = student.copy()
        snapshot.set_params(params)
        return save_model(snapshot, out_dir / f"last_good{get_settings().checkpoint_suffix}")

    def _write_outputs(self, result: RunResult, out_dir: Path) -> None:
        cfg = self.config
        suffix = get_settings().checkpoint_suffix
        out_dir.mkdir(parents=True, exist_ok=True)
        save_run_config(cfg, out_dir / "config.json")
        result.metrics.write_csv(out_dir / "metrics.csv")
        result.deterministic_metrics().write_csv(out_dir / DETERMINISTIC_METRICS_FILE)
        if cfg.save_scores:
            for t, table in result.scores.items():
                table.write_csv(out_dir / f"scores_epoch{t}.csv")
        for coreset in result.coresets:
            write_coreset(out_dir / f"coreset_epoch{coreset.epoch_created}.txt", coreset)
        save_model(result.model, out_dir / f"student{suffix}", role="student")
        if result.teacher is not None:
            save_model(result.teacher, out_dir / f"teacher{suffix}", role="teacher")
        self._log(f"✓ Wrote run outputs to {out_dir}")


def run_qat(
    config: RunConfig,
    split: Optional[DataSplit] = None,
    teacher: Optional[MLP] = None,
    verbose: Optional[bool] = None,
) -> RunResult:
    """Run one configuration; see :class:`QATRunner`."""
    return QATRunner(config, split=split, teacher=teacher, verbose=verbose).run()
