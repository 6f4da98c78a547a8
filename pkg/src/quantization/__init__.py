"""Quantization package: fake quantization and the straight-through estimator."""

from .quantizer import (
    FULL_PRECISION_BITS,
    SCALE_FLOOR,
    QuantConfig,
    calibrate_scale,
    make_quant_config,
    quantize,
    quantize_array,
    ste_gradient,
    ste_mask,
)

__all__ = [
    "FULL_PRECISION_BITS",
    "SCALE_FLOOR",
    "QuantConfig",
    "calibrate_scale",
    "make_quant_config",
    "quantize",
    "quantize_array",
    "ste_gradient",
    "ste_mask",
]
