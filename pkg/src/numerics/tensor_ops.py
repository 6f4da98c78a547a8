"""Dense arithmetic, softmax/cross-entropy and the SGD update rule.

Inputs to the network are row batches (``Tensor2``): a 2-D float64 array of
shape (rows, cols). Probability vectors are 1-D arrays, or rows of a 2-D array
when an operation is applied to a batch.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..utils.errors import DimensionError

LOG_EPS = 1e-12


def as_tensor2(values, cols: Optional[int] = None) -> np.ndarray:
    """
    Coerce values to a finite float64 row batch.

    Args:
        values: Array-like of shape (rows, cols) or a single row.
        cols: Expected column count, if known.

    Returns:
        2-D float64 array.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D batch, got shape {arr.shape}")
    if cols is not None and arr.shape[1] != cols:
        raise DimensionError(f"expected {cols} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("tensor contains non-finite values")
    return arr


def _check_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{what}: shape {a.shape} does not match {b.shape}")


def softmax(logits) -> np.ndarray:
    """
    Numerically stable softmax over the last axis.

    Args:
        logits: 1-D logits or a 2-D batch of logit rows.

    Returns:
        Probabilities with the same shape, each row summing to 1.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0 or z.shape[-1] == 0:
        raise DimensionError("softmax of an empty vector")
    shifted = z - np.max(z, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=-1, keepdims=True)


def cross_entropy(p, target):
    """
    Cross-entropy -sum(target * log(max(p, eps))).

    Args:
        p: Predicted probabilities (1-D, or a 2-D batch of rows).
        target: One-hot or soft targets with the same shape.

    Returns:
        A float for 1-D inputs, or a per-row array for batches.
    """
    p = np.asarray(p, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_same_shape(p, target, "cross_entropy")
    losses = -np.sum(target * np.log(np.maximum(p, LOG_EPS)), axis=-1)
    return float(losses) if losses.ndim == 0 else losses


def ce_logit_gradient(p, target) -> np.ndarray:
    """Gradient of cross_entropy(softmax(z), target) with respect to z, i.e. p - target."""
    p = np.asarray(p, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check_same_shape(p, target, "ce_logit_gradient")
    return p - target


@dataclass
class GradientBuffer:
    """Per-layer gradients, shape-congruent with the model that produced them."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def flat(self) -> np.ndarray:
        """All gradient entries concatenated in layer order (weights then bias)."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts) if parts else np.zeros(0)

    def norm(self) -> float:
        """Euclidean norm over every gradient entry."""
        return float(np.linalg.norm(self.flat()))

    def scaled(self, factor: float) -> "GradientBuffer":
        return GradientBuffer(
            weights=[w * factor for w in self.weights],
            biases=[b * factor for b in self.biases],
        )


@dataclass
class Parameters:
    """Real-valued parameters w^r of a layered model."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def copy(self) -> "Parameters":
        return Parameters(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


def sgd_update(
    params: Parameters, grads: GradientBuffer, lr: float, weight_decay: float = 0.0
) -> Parameters:
    """
    Apply one SGD step w <- w - lr * (g + weight_decay * w).

    Args:
        params: Current real-valued parameters.
        grads: Gradients congruent with params.
        lr: Learning rate, must be positive.
        weight_decay: Optional L2 coefficient; 0.0 gives the plain update.

    Returns:
        New Parameters; the inputs are not modified.
    """
    if lr <= 0:
        raise DimensionError(f"learning rate must be positive, got {lr}")
    if len(params.weights) != len(grads.weights) or len(params.biases) != len(grads.biases):
        raise DimensionError("gradient buffer has a different number of layers than params")

    new_weights = []
    new_biases = []
    for w, g in zip(params.weights, grads.weights):
        _check_same_shape(w, g, "sgd_update weight")
        step = g if weight_decay == 0.0 else g + weight_decay * w
        new_weights.append(w - lr * step)
    for b, g in zip(params.biases, grads.biases):
        _check_same_shape(b, g, "sgd_update bias")
        new_biases.append(b - lr * g)
    return Parameters(weights=new_weights, biases=new_biases)
