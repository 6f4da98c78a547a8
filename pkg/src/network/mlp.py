"""Multi-layer perceptron with full-precision and fake-quantized forward modes."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..numerics import GradientBuffer, Parameters, as_tensor2, ce_logit_gradient, softmax
from ..quantization import (
    QuantConfig,
    calibrate_scale,
    make_quant_config,
    quantize_array,
    ste_mask,
)
from ..utils.errors import ConfigurationError, DimensionError, FormatError, StateError

Mode = Literal["fp", "quant"]

CHECKPOINT_VERSION = 1


@dataclass
class ForwardTrace:
    """Values retained by :meth:`MLP.forward` for the backward pass."""

    mode: Mode
    model_uid: int
    version: int
    layer_inputs: List[np.ndarray]
    quantized_inputs: List[np.ndarray]
    used_weights: List[np.ndarray]
    pre_activations: List[np.ndarray]
    probs: np.ndarray


_next_uid = iter(range(1, 2**62))


@dataclass
class MLP:
    """
    Layered classifier: ReLU hidden layers and a softmax head.

    Real weights are the only stored parameters; quantized weights are derived
    on every quant-mode forward from the per-layer configs.
    """

    arch: List[int]
    seed: int
    params: Parameters
    weight_quant: List[Optional[QuantConfig]]
    act_quant: List[Optional[QuantConfig]]
    version: int = 0
    uid: int = field(default_factory=lambda: next(_next_uid))

    @property
    def num_layers(self) -> int:
        return len(self.arch) - 1

    @property
    def num_classes(self) -> int:
        return self.arch[-1]

    def parameter_count(self) -> int:
        return int(
            sum(w.size for w in self.params.weights) + sum(b.size for b in self.params.biases)
        )

    def copy(self) -> "MLP":
        """Independent copy (new uid, same version)."""
        return MLP(
            arch=list(self.arch),
            seed=self.seed,
            params=self.params.copy(),
            weight_quant=list(self.weight_quant),
            act_quant=list(self.act_quant),
            version=self.version,
        )

    def set_params(self, params: Parameters) -> None:
        """Replace the real weights; invalidates outstanding traces."""
        current = self.params.weights + self.params.biases
        for old, new in zip(current, params.weights + params.biases):
            if old.shape != new.shape:
                raise DimensionError(f"parameter shape {new.shape} does not match {old.shape}")
        self.params = params
        self.version += 1

    # ------------------------------------------------------------------
    # Quantization setup

    def configure_quantization(
        self,
        bits_w: int,
        bits_a: int = 32,
        keep_edge_layers_fp: bool = True,
        calibration_inputs: Optional[np.ndarray] = None,
    ) -> None:
        """
        Attach per-layer quantizers and calibrate their scales.

        Args:
            bits_w: Weight bit-width (signed quantizer).
            bits_a: Activation bit-width (unsigned, post-ReLU). 32 disables.
            keep_edge_layers_fp: Leave first and last layer in full precision.
            calibration_inputs: Batch used to calibrate activation scales.
        """
        if bits_a < 32 and calibration_inputs is None and not (
            keep_edge_layers_fp and self.num_layers <= 2
        ):
            raise ConfigurationError("activation quantization needs calibration inputs")
        weight_quant: List[Optional[QuantConfig]] = []
        act_quant: List[Optional[QuantConfig]] = []
        for layer in range(self.num_layers):
            edge = layer == 0 or layer == self.num_layers - 1
            if keep_edge_layers_fp and edge:
                weight_quant.append(None)
                act_quant.append(None)
                continue
            weight_quant.append(
                calibrate_scale(self.params.weights[layer], make_quant_config(bits_w, signed=True))
            )
            act_quant.append(None if bits_a >= 32 else make_quant_config(bits_a, signed=False))
        self.weight_quant = weight_quant
        self.act_quant = act_quant

        if any(cfg is not None for cfg in act_quant):
            trace = self.forward(calibration_inputs, mode="fp")[1]
            self.act_quant = [
                None if cfg is None else calibrate_scale(trace.layer_inputs[layer], cfg)
                for layer, cfg in enumerate(act_quant)
            ]
        self.version += 1

    def recalibrate_weights(self) -> None:
        """Re-derive weight scales from the current real weights."""
        self.weight_quant = [
            None if cfg is None else calibrate_scale(self.params.weights[layer], cfg)
            for layer, cfg in enumerate(self.weight_quant)
        ]
        self.version += 1

    # ------------------------------------------------------------------
    # Forward / backward

    def forward(self, x, mode: Mode = "quant"):
        """
        Run a batch through the network.

        Args:
            x: Batch of shape (rows, input width).
            mode: "fp" ignores quantization, "quant" uses fake-quantized tensors.

        Returns:
            Tuple of (probability rows, ForwardTrace).
        """
        if mode not in ("fp", "quant"):
            raise ConfigurationError(f"unknown forward mode {mode!r}")
        h = as_tensor2(x, cols=self.arch[0])
        layer_inputs, quantized_inputs, used_weights, pre_acts = [], [], [], []

        for layer in range(self.num_layers):
            w = self.params.weights[layer]
            a_in = h
            if mode == "quant":
                w_cfg = self.weight_quant[layer]
                a_cfg = self.act_quant[layer]
                if w_cfg is not None:
                    w = quantize_array(w, w_cfg)
                if a_cfg is not None:
                    a_in = quantize_array(h, a_cfg)
            z = a_in @ w + self.params.biases[layer]
            layer_inputs.append(h)
            quantized_inputs.append(a_in)
            used_weights.append(w)
            pre_acts.append(z)
            h = np.maximum(z, 0.0) if layer < self.num_layers - 1 else z

        probs = softmax(pre_acts[-1])
        trace = ForwardTrace(
            mode=mode,
            model_uid=self.uid,
            version=self.version,
            layer_inputs=layer_inputs,
            quantized_inputs=quantized_inputs,
            used_weights=used_weights,
            pre_activations=pre_acts,
            probs=probs,
        )
        return probs, trace

    def predict(self, x, mode: Mode = "quant") -> np.ndarray:
        return self.forward(x, mode)[0]

    def backward(self, trace: ForwardTrace, targets) -> GradientBuffer:
        """
        Gradients of the summed cross-entropy loss with respect to the real weights.

        Args:
            trace: Trace from a forward call on this model at its current version.
            targets: One-hot or soft target rows.

        Returns:
            GradientBuffer congruent with the parameters.
        """
        if trace.model_uid != self.uid or trace.version != self.version:
            raise StateError("forward trace is stale or belongs to another model")
        targets = np.asarray(targets, dtype=np.float64)
        if targets.shape != trace.probs.shape:
            raise DimensionError(
                f"targets shape {targets.shape} does not match outputs {trace.probs.shape}"
            )

        grad_w: List[np.ndarray] = [None] * self.num_layers  # type: ignore[list-item]
        grad_b: List[np.ndarray] = [None] * self.num_layers  # type: ignore[list-item]
        dz = ce_logit_gradient(trace.probs, targets)

        for layer in reversed(range(self.num_layers)):
            quant = trace.mode == "quant"
            w_cfg = self.weight_quant[layer] if quant else None
            a_cfg = self.act_quant[layer] if quant else None

            dw = trace.quantized_inputs[layer].T @ dz
            if w_cfg is not None and not w_cfg.is_passthrough:
                dw = dw * ste_mask(self.params.weights[layer], w_cfg)
            grad_w[layer] = dw
            grad_b[layer] = np.sum(dz, axis=0)

            if layer == 0:
                break
            dh = dz @ trace.used_weights[layer].T
            if a_cfg is not None and not a_cfg.is_passthrough:
                dh = dh * ste_mask(trace.layer_inputs[layer], a_cfg)
            dz = dh * (trace.pre_activations[layer - 1] > 0.0)

        return GradientBuffer(weights=grad_w, biases=grad_b)


def init_model(arch: Sequence[int], seed: int) -> MLP:
    """
    Initialize an MLP with He-style uniform weights and zero biases.

    Args:
        arch: Layer widths, input first and class count last.
        seed: Seed for the weight draw.

    Returns:
        MLP with no quantizers attached (all layers full precision).
    """
    arch = [int(w) for w in arch]
    if len(arch) < 2:
        raise ConfigurationError(f"architecture needs at least 2 widths, got {arch}")
    if any(w <= 0 for w in arch):
        raise ConfigurationError(f"architecture widths must be positive, got {arch}")

    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(arch[:-1], arch[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    layers = len(arch) - 1
    return MLP(
        arch=arch,
        seed=int(seed),
        params=Parameters(weights=weights, biases=biases),
        weight_quant=[None] * layers,
        act_quant=[None] * layers,
    )


def evaluate(model: MLP, features, labels, mode: Mode = "quant", batch_size: int = 1024) -> float:
    """
    Fraction of samples whose argmax prediction equals the label.

    Ties go to the lowest class index (numpy argmax).
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise DimensionError("cannot evaluate on an empty dataset")
    correct = 0
    for start in range(0, len(labels), batch_size):
        probs = model.predict(features[start : start + batch_size], mode)
        correct += int(np.sum(np.argmax(probs, axis=1) == labels[start : start + batch_size]))
    return correct / len(labels)


# ----------------------------------------------------------------------
# Checkpoints


class CheckpointHeader(BaseModel):
    """JSON header stored next to the raw arrays of a checkpoint."""

    format_version: int = CHECKPOINT_VERSION
    role: Literal["student", "teacher"] = "student"
    arch: List[int]
    seed: int
    weight_quant: List[Optional[QuantConfig]]
    act_quant: List[Optional[QuantConfig]]


def save_model(model: MLP, path: Path, role: Literal["student", "teacher"] = "student") -> Path:
    """Write arch, seed, quantizer configs and raw float64 weights to an .npz file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = CheckpointHeader(
        role=role,
        arch=model.arch,
        seed=model.seed,
        weight_quant=model.weight_quant,
        act_quant=model.act_quant,
    )
    arrays = {"header": np.array(header.model_dump_json())}
    for layer, (w, b) in enumerate(zip(model.params.weights, model.params.biases)):
        arrays[f"w{layer}"] = w
        arrays[f"b{layer}"] = b
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    return path


def load_model(path: Path, expected_role: Optional[str] = None) -> MLP:
    """Inverse of :func:`save_model`; bit-exact."""
    path = Path(path)
    with np.load(path, allow_pickle=False) as archive:
        if "header" not in archive.files:
            raise FormatError(f"{path} is not a model checkpoint (no header)")
        header = CheckpointHeader.model_validate(json.loads(str(archive["header"])))
        if header.format_version != CHECKPOINT_VERSION:
            raise FormatError(f"unsupported checkpoint version {header.format_version}")
        if expected_role is not None and header.role != expected_role:
            raise FormatError(f"checkpoint role is {header.role!r}, expected {expected_role!r}")
        layers = len(header.arch) - 1
        weights = [archive[f"w{layer}"].astype(np.float64) for layer in range(layers)]
        biases = [archive[f"b{layer}"].astype(np.float64) for layer in range(layers)]
    return MLP(
        arch=header.arch,
        seed=header.seed,
        params=Parameters(weights=weights, biases=biases),
        weight_quant=header.weight_quant,
        act_quant=header.act_quant,
    )
