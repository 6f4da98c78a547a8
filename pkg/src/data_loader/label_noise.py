"""Label-noise injection and noisy-sample recall."""

from typing import Iterable

import numpy as np

from ..utils.errors import ConfigurationError, InputError
from ..utils.seeding import Stream, rng_for
from .dataset import Dataset


def inject_label_noise(data: Dataset, fraction: float, seed: int) -> Dataset:
    """
    Corrupt the labels of exactly round(fraction * N) distinct samples.

    Each corrupted label is drawn uniformly from the M-1 classes that differ
    from the original, so every chosen sample really changes class.

    Args:
        data: Clean dataset.
        fraction: Noise rate rho in [0, 1).
        seed: Master seed; draws come from the noise stream.

    Returns:
        New Dataset with changed labels and ``noisy_ids`` set.
    """
    if not 0.0 <= fraction < 1.0:
        raise ConfigurationError(f"noise fraction must lie in [0, 1), got {fraction}")
    n = len(data)
    count = int(np.floor(fraction * n + 0.5))
    if count == 0:
        return data.with_labels(data.labels.copy(), noisy_ids=())
    if data.num_classes < 2:
        raise ConfigurationError("label noise needs at least two classes")

    rng = rng_for(seed, Stream.NOISE)
    chosen = np.sort(rng.choice(n, size=count, replace=False))
    labels = data.labels.copy()
    draws = rng.integers(0, data.num_classes - 1, size=count)
    # skip over the original class so the draw is uniform over the others
    originals = labels[chosen]
    labels[chosen] = draws + (draws >= originals)
    return data.with_labels(labels, noisy_ids=chosen.tolist())


def noisy_recall(pruned_ids: Iterable[int], noisy_ids: Iterable[int]) -> float:
    """
    Fraction of corrupted samples that were pruned from the coreset.

    Args:
        pruned_ids: Ids left out of the coreset (all ids minus coreset ids).
        noisy_ids: Ids whose labels were corrupted.

    Returns:
        |pruned ∩ noisy| / |noisy|.
    """
    noisy = set(int(i) for i in noisy_ids)
    if not noisy:
        raise InputError("noisy recall is undefined without noisy samples")
    pruned = set(int(i) for i in pruned_ids)
    return len(pruned & noisy) / len(noisy)
