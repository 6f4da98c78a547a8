"""Numerics package: dense arithmetic substrate."""

from .tensor_ops import (
    LOG_EPS,
    GradientBuffer,
    Parameters,
    as_tensor2,
    ce_logit_gradient,
    cross_entropy,
    sgd_update,
    softmax,
)

__all__ = [
    "LOG_EPS",
    "GradientBuffer",
    "Parameters",
    "as_tensor2",
    "ce_logit_gradient",
    "cross_entropy",
    "sgd_update",
    "softmax",
]
