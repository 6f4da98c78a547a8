"""Uniform b-bit fake quantization and the straight-through estimator."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..utils.errors import ConfigurationError, StateError

FULL_PRECISION_BITS = 32
SCALE_FLOOR = 1e-8


class QuantConfig(BaseModel):
    """Level counts and step size of one quantized tensor."""

    model_config = ConfigDict(frozen=True)

    bits: int
    signed: bool
    q_n: int
    q_p: int
    scale: Optional[float] = None

    @property
    def is_passthrough(self) -> bool:
        """Bit-widths of 32 and above disable quantization entirely."""
        return self.bits >= FULL_PRECISION_BITS

    @property
    def is_calibrated(self) -> bool:
        return self.scale is not None

    def require_scale(self) -> float:
        if self.scale is None:
            raise StateError(f"{self.bits}-bit quantizer used before scale calibration")
        return self.scale


def make_quant_config(bits: int, signed: bool) -> QuantConfig:
    """
    Build an uncalibrated quantizer config.

    Args:
        bits: Bit-width b (>= 1, >= 2 when signed).
        signed: Signed data uses Q_N = 2^(b-1), Q_P = 2^(b-1) - 1;
            unsigned data uses Q_N = 0, Q_P = 2^b - 1.

    Returns:
        QuantConfig with scale unset.
    """
    if bits < 1:
        raise ConfigurationError(f"bit-width must be >= 1, got {bits}")
    if signed and bits == 1:
        raise ConfigurationError("signed 1-bit quantization leaves no positive levels")
    if signed:
        q_n, q_p = 2 ** (bits - 1), 2 ** (bits - 1) - 1
    else:
        q_n, q_p = 0, 2**bits - 1
    return QuantConfig(bits=bits, signed=signed, q_n=q_n, q_p=q_p)


def calibrate_scale(values, cfg: QuantConfig) -> QuantConfig:
    """Set s = max|v| / max(Q_N, Q_P), floored at 1e-8."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ConfigurationError("cannot calibrate a quantizer on an empty tensor")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("cannot calibrate a quantizer on non-finite values")
    scale = float(np.max(np.abs(arr))) / max(cfg.q_n, cfg.q_p)
    return cfg.model_copy(update={"scale": max(scale, SCALE_FLOOR)})


def quantize_array(values, cfg: QuantConfig) -> np.ndarray:
    """Vectorized s * round_half_even(clip(v / s, -Q_N, Q_P))."""
    arr = np.asarray(values, dtype=np.float64)
    if cfg.is_passthrough:
        return arr
    s = cfg.require_scale()
    # np.round rounds half to even
    return s * np.round(np.clip(arr / s, -cfg.q_n, cfg.q_p))


def quantize(v: float, cfg: QuantConfig) -> float:
    """Scalar form of :func:`quantize_array`."""
    return float(quantize_array(v, cfg))


def ste_mask(values, cfg: QuantConfig) -> np.ndarray:
    """1.0 where -Q_N <= v/s <= Q_P (inclusive), else 0.0."""
    arr = np.asarray(values, dtype=np.float64)
    if cfg.is_passthrough:
        return np.ones_like(arr)
    s = cfg.require_scale()
    ratio = arr / s
    return ((ratio >= -cfg.q_n) & (ratio <= cfg.q_p)).astype(np.float64)


def ste_gradient(v_real, upstream, cfg: QuantConfig):
    """
    Straight-through gradient of the quantizer.

    Args:
        v_real: Real-valued input(s) of the quantizer.
        upstream: Gradient arriving at the quantizer output.
        cfg: Calibrated config.

    Returns:
        upstream inside the clip interval, 0 outside. Scalars in, float out.
    """
    upstream_arr = np.asarray(upstream, dtype=np.float64)
    out = np.where(ste_mask(v_real, cfg) > 0, upstream_arr, 0.0)
    return float(out) if out.ndim == 0 else out
