"""Full-precision teacher training, cached teacher outputs and the KD loss."""

from typing import Dict, Optional, Sequence

import numpy as np

from ..data_loader import Dataset
from ..network import MLP, evaluate, init_model, train_epoch
from ..numerics import cross_entropy
from ..utils.errors import DimensionError, InputError, RunError, StateError
from ..utils.seeding import Stream, derive_seed, rng_for


def kd_loss(p_student, p_teacher):
    """
    Distillation loss -sum(p_T * log(max(p, eps))) at temperature 1.

    Args:
        p_student: Student probabilities (1-D, or a batch of rows).
        p_teacher: Teacher probabilities, same shape.

    Returns:
        The loss for one sample, or the mean over the batch rows.
    """
    p_student = np.asarray(p_student, dtype=np.float64)
    p_teacher = np.asarray(p_teacher, dtype=np.float64)
    if p_student.shape != p_teacher.shape:
        raise DimensionError(
            f"kd_loss: student shape {p_student.shape} does not match teacher {p_teacher.shape}"
        )
    losses = cross_entropy(p_student, p_teacher)
    return float(np.mean(losses)) if p_student.ndim == 2 else losses


def train_teacher(
    arch: Sequence[int],
    dataset: Dataset,
    epochs: int,
    lr: float,
    seed: int,
    batch_size: int = 32,
    weight_decay: float = 0.0,
    verbose: bool = True,
) -> MLP:
    """
    Train the full-precision teacher on hard labels.

    Args:
        arch: Layer widths.
        dataset: Clean training data; label noise is only injected for the student.
        epochs: Training epochs; 0 returns the initialized model.
        lr: Learning rate.
        seed: Master seed; init and shuffling use their own streams.
        batch_size: Mini-batch size.
        weight_decay: L2 coefficient.
        verbose: Print per-epoch progress.

    Returns:
        The trained full-precision model.
    """
    model = init_model(arch, derive_seed(seed, Stream.TEACHER_INIT))
    targets = dataset.one_hot
    for epoch in range(epochs):
        order = rng_for(seed, Stream.TEACHER_SHUFFLE, epoch).permutation(len(dataset))
        stats = train_epoch(
            model,
            dataset.features,
            targets,
            dataset.labels,
            order,
            lr=lr,
            batch_size=batch_size,
            mode="fp",
            weight_decay=weight_decay,
        )
        if not stats.finite:
            raise RunError(f"teacher training diverged at epoch {epoch} (loss is not finite)")
        if verbose:
            print(
                f"  Teacher epoch {epoch + 1}/{epochs}: "
                f"loss={stats.mean_loss:.4f} train_acc={stats.accuracy:.4f}"
            )
    if verbose and epochs:
        acc = evaluate(model, dataset.features, dataset.labels, mode="fp")
        print(f"Teacher train accuracy: {acc:.4f}")
    return model


class TeacherCache:
    """Frozen teacher with memoized per-sample output distributions."""

    def __init__(self, teacher: MLP, dataset: Dataset):
        """
        Initialize the cache.

        Args:
            teacher: Trained full-precision model; copied so later changes cannot leak in.
            dataset: Samples whose ids the cache answers for.
        """
        self.teacher = teacher.copy()
        self.dataset = dataset
        self.forward_calls = 0
        self._cache: Dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._cache)

    def predict(self, sample_id: int) -> np.ndarray:
        """Teacher distribution for one sample, computed on first access."""
        sample_id = int(sample_id)
        if not 0 <= sample_id < len(self.dataset):
            raise InputError(f"unknown sample id {sample_id}")
        cached = self._cache.get(sample_id)
        if cached is None:
            self.forward_calls += 1
            cached = self.teacher.predict(self.dataset.features[sample_id], mode="fp")[0]
            cached.setflags(write=False)
            self._cache[sample_id] = cached
        return cached

    def warm_up(self, batch_size: int = 1024) -> None:
        """Populate every missing entry with batched forwards."""
        missing = np.array([i for i in range(len(self.dataset)) if i not in self._cache])
        for start in range(0, len(missing), batch_size):
            ids = missing[start : start + batch_size]
            self.forward_calls += 1
            probs = self.teacher.predict(self.dataset.features[ids], mode="fp")
            for i, row in zip(ids, probs):
                row = row.copy()
                row.setflags(write=False)
                self._cache[int(i)] = row

    def matrix(self, ids: Optional[Sequence[int]] = None) -> np.ndarray:
        """Teacher rows for ``ids`` (default: all samples), in order."""
        if ids is None:
            if len(self._cache) != len(self.dataset):
                raise StateError("teacher cache is not warmed up")
            ids = range(len(self.dataset))
        return np.stack([self.predict(i) for i in ids])


def teacher_predict(cache: TeacherCache, sample_id: int) -> np.ndarray:
    """Cached teacher distribution of one sample."""
    return cache.predict(sample_id)
