"""Mini-batch SGD epoch shared by teacher and student training."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..numerics import cross_entropy, sgd_update
from .mlp import MLP, Mode


@dataclass
class EpochStats:
    """Outcome of one pass over an ordered sample list."""

    mean_loss: float
    accuracy: float
    steps: int
    samples: int

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.mean_loss))


def train_epoch(
    model: MLP,
    features: np.ndarray,
    targets: np.ndarray,
    labels: np.ndarray,
    order: np.ndarray,
    lr: float,
    batch_size: int,
    mode: Mode = "quant",
    weight_decay: float = 0.0,
    max_steps: Optional[int] = None,
) -> EpochStats:
    """
    Train over ``order`` in consecutive mini-batches.

    The per-batch objective is the mean target cross-entropy (the 1/N of the
    distillation loss); gradients from :meth:`MLP.backward` are summed over the
    batch, so they are scaled by 1/batch before the update.

    Args:
        model: Model updated in place through ``set_params``.
        features: Feature rows for every dataset sample, indexed by id.
        targets: Target rows (one-hot or soft) indexed by id.
        labels: Integer labels indexed by id, for the running accuracy.
        order: Sample ids in training order.
        lr: Learning rate.
        batch_size: Mini-batch size.
        mode: Forward mode used for training.
        weight_decay: L2 coefficient passed to the SGD update.
        max_steps: Stop after this many updates (fixed-budget mode).

    Returns:
        EpochStats with the sample-weighted mean loss and training accuracy.
    """
    total_loss = 0.0
    correct = 0
    seen = 0
    steps = 0
    for start in range(0, len(order), batch_size):
        if max_steps is not None and steps >= max_steps:
            break
        batch = order[start : start + batch_size]
        probs, trace = model.forward(features[batch], mode)
        batch_targets = targets[batch]
        losses = cross_entropy(probs, batch_targets)
        total_loss += float(np.sum(losses))
        correct += int(np.sum(np.argmax(probs, axis=1) == labels[batch]))
        seen += len(batch)
        if not np.all(np.isfinite(losses)):
            return EpochStats(
                mean_loss=float("nan"), accuracy=correct / seen, steps=steps, samples=seen
            )

        grads = model.backward(trace, batch_targets).scaled(1.0 / len(batch))
        model.set_params(sgd_update(model.params, grads, lr, weight_decay))
        steps += 1

    if seen == 0:
        return EpochStats(mean_loss=0.0, accuracy=0.0, steps=0, samples=0)
    return EpochStats(
        mean_loss=total_loss / seen, accuracy=correct / seen, steps=steps, samples=seen
    )
