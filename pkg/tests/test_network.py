"""Tests for the MLP, its backward pass and checkpoints."""

import numpy as np
import pytest

from src.network import evaluate, init_model, load_model, save_model, train_epoch
from src.numerics import Parameters, cross_entropy
from src.quantization import ste_mask
from src.utils.errors import ConfigurationError, DimensionError, FormatError, StateError


def _one_hot(labels, classes):
    out = np.zeros((len(labels), classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


def _summed_loss(model, x, targets, mode="fp"):
    return float(np.sum(cross_entropy(model.predict(x, mode), targets)))


def _perturbed(params: Parameters, kind: str, layer: int, index, delta: float) -> Parameters:
    new = params.copy()
    getattr(new, kind)[layer][index] += delta
    return new


def test_init_model_is_deterministic_and_shaped():
    a = init_model([4, 6, 3], seed=11)
    b = init_model([4, 6, 3], seed=11)
    for wa, wb in zip(a.params.weights, b.params.weights):
        np.testing.assert_array_equal(wa, wb)
    assert [w.shape for w in a.params.weights] == [(4, 6), (6, 3)]
    assert all(np.all(bias == 0) for bias in a.params.biases)
    assert a.parameter_count() == 4 * 6 + 6 + 6 * 3 + 3
    assert np.max(np.abs(a.params.weights[0])) <= np.sqrt(6.0 / 4)


@pytest.mark.parametrize("arch", [[4], [4, 0, 3], []])
def test_init_model_rejects_bad_arch(arch):
    with pytest.raises(ConfigurationError):
        init_model(arch, seed=0)


def test_forward_outputs_are_distributions(rng):
    model = init_model([5, 7, 4], seed=2)
    probs = model.predict(rng.normal(size=(10, 5)), mode="fp")
    assert probs.shape == (10, 4)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)


def test_forward_rejects_wrong_width():
    model = init_model([5, 3], seed=2)
    with pytest.raises(DimensionError):
        model.predict(np.zeros((2, 4)))


def _assert_gradient_matches(model, x, targets, h=1e-6):
    base = model.params.copy()
    _, trace = model.forward(x, mode="fp")
    grads = model.backward(trace, targets)
    shifted = model.copy()
    for kind, analytic in (("weights", grads.weights), ("biases", grads.biases)):
        for layer, g in enumerate(analytic):
            for index in np.ndindex(g.shape):
                shifted.set_params(_perturbed(base, kind, layer, index, h))
                up = _summed_loss(shifted, x, targets)
                shifted.set_params(_perturbed(base, kind, layer, index, -h))
                down = _summed_loss(shifted, x, targets)
                assert g[index] == pytest.approx((up - down) / (2 * h), rel=1e-5, abs=1e-7)


def test_fp_gradient_matches_central_differences(rng):
    model = init_model([3, 4, 3], seed=5)
    x = rng.normal(size=(6, 3))
    targets = _one_hot(rng.integers(0, 3, size=6), 3)
    _assert_gradient_matches(model, x, targets)


@pytest.mark.parametrize("case", range(20))
def test_fp_gradient_matches_central_differences_on_random_models(case):
    rng = np.random.default_rng(1000 + case)
    depth = int(rng.integers(1, 4))
    arch = [int(w) for w in rng.integers(2, 6, size=depth + 1)]
    model = init_model(arch, seed=case)
    model.set_params(
        Parameters(
            weights=model.params.weights,
            biases=[rng.normal(scale=0.3, size=b.shape) for b in model.params.biases],
        )
    )
    rows = int(rng.integers(1, 6))
    x = rng.normal(size=(rows, arch[0]))
    targets = _one_hot(rng.integers(0, arch[-1], size=rows), arch[-1])
    _assert_gradient_matches(model, x, targets)


def test_quant_gradient_is_masked_gradient_of_quantized_network(rng):
    model = init_model([3, 5, 5, 3], seed=9)
    model.configure_quantization(bits_w=2)
    assert model.weight_quant[0] is None and model.weight_quant[2] is None
    assert model.weight_quant[1] is not None

    x = rng.normal(size=(8, 3))
    targets = _one_hot(rng.integers(0, 3, size=8), 3)
    _, trace = model.forward(x, mode="quant")
    grads = model.backward(trace, targets)

    shadow = model.copy()
    shadow.set_params(Parameters(weights=list(trace.used_weights), biases=model.params.biases))
    _, shadow_trace = shadow.forward(x, mode="fp")
    shadow_grads = shadow.backward(shadow_trace, targets)

    mask = ste_mask(model.params.weights[1], model.weight_quant[1])
    np.testing.assert_allclose(grads.weights[1], shadow_grads.weights[1] * mask, atol=1e-12)
    for layer in (0, 2):
        np.testing.assert_allclose(
            grads.weights[layer], shadow_grads.weights[layer], atol=1e-12
        )


def test_gradient_doubles_for_duplicated_batch(rng):
    model = init_model([4, 6, 3], seed=1)
    model.configure_quantization(bits_w=2, keep_edge_layers_fp=False)
    x = rng.normal(size=(5, 4))
    targets = _one_hot(rng.integers(0, 3, size=5), 3)
    _, single = model.forward(x)
    _, double = model.forward(np.vstack([x, x]))
    once = model.backward(single, targets).flat()
    twice = model.backward(double, np.vstack([targets, targets])).flat()
    np.testing.assert_allclose(twice, 2.0 * once, rtol=1e-12, atol=1e-15)


def test_backward_rejects_stale_or_foreign_trace(rng):
    model = init_model([3, 4, 2], seed=0)
    x = rng.normal(size=(2, 3))
    targets = _one_hot([0, 1], 2)
    _, trace = model.forward(x)
    other = model.copy()
    with pytest.raises(StateError):
        other.backward(trace, targets)
    model.set_params(model.params.copy())
    with pytest.raises(StateError):
        model.backward(trace, targets)


def test_backward_rejects_target_shape_mismatch(rng):
    model = init_model([3, 2], seed=0)
    _, trace = model.forward(rng.normal(size=(2, 3)))
    with pytest.raises(DimensionError):
        model.backward(trace, np.zeros((2, 3)))


def test_activation_quantization_needs_calibration_inputs(rng):
    model = init_model([3, 6, 6, 2], seed=4)
    with pytest.raises(ConfigurationError):
        model.configure_quantization(bits_w=4, bits_a=4)
    model.configure_quantization(bits_w=4, bits_a=4, calibration_inputs=rng.normal(size=(20, 3)))
    act = model.act_quant[1]
    assert act is not None and not act.signed and act.is_calibrated
    assert model.act_quant[0] is None and model.act_quant[2] is None


def test_passthrough_bits_match_fp_forward(rng):
    model = init_model([3, 6, 6, 2], seed=4)
    model.configure_quantization(bits_w=32, keep_edge_layers_fp=False)
    x = rng.normal(size=(7, 3))
    np.testing.assert_array_equal(model.predict(x, "quant"), model.predict(x, "fp"))


def test_two_bit_forward_matches_frozen_values():
    model = init_model([2, 2, 2], seed=0)
    model.set_params(
        Parameters(
            weights=[np.array([[1.0, -0.5], [0.25, 0.75]]), np.array([[1.0, 0.0], [0.0, -1.0]])],
            biases=[np.array([0.25, 0.0]), np.zeros(2)],
        )
    )
    model.configure_quantization(bits_w=2, keep_edge_layers_fp=False)
    assert [cfg.scale for cfg in model.weight_quant] == [0.5, 0.5]

    probs, trace = model.forward(np.array([[2.0, 1.0]]), mode="quant")
    np.testing.assert_array_equal(trace.used_weights[0], [[0.5, -0.5], [0.0, 0.5]])
    np.testing.assert_array_equal(trace.used_weights[1], [[0.5, 0.0], [0.0, -1.0]])
    np.testing.assert_array_equal(trace.pre_activations[0], [[1.25, -0.5]])
    np.testing.assert_array_equal(trace.pre_activations[1], [[0.625, 0.0]])
    np.testing.assert_allclose(probs, [[0.6513548, 0.3486452]], atol=1e-6)


def test_passthrough_bits_train_identically_to_fp(rng):
    model = init_model([3, 6, 6, 2], seed=4)
    model.configure_quantization(bits_w=32, keep_edge_layers_fp=False)
    quant, fp = model.copy(), model.copy()
    features = rng.normal(size=(40, 3))
    labels = rng.integers(0, 2, size=40)
    targets = _one_hot(labels, 2)
    order = rng.permutation(40)
    for student, mode in ((quant, "quant"), (fp, "fp")):
        stats = train_epoch(
            student, features, targets, labels, order, 0.1, 4, mode=mode, max_steps=10
        )
        assert stats.steps == 10
    quant_params = quant.params.weights + quant.params.biases
    for a, b in zip(quant_params, fp.params.weights + fp.params.biases):
        np.testing.assert_array_equal(a, b)


def test_evaluate(rng):
    model = init_model([2, 2], seed=0)
    model.set_params(Parameters(weights=[np.eye(2)], biases=[np.zeros(2)]))
    features = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    assert evaluate(model, features, np.array([0, 1, 1]), mode="fp") == pytest.approx(2 / 3)
    with pytest.raises(DimensionError):
        evaluate(model, np.zeros((0, 2)), np.zeros(0, dtype=int))


def test_checkpoint_round_trip_is_bit_exact(tmp_path, rng):
    model = init_model([4, 8, 3], seed=3)
    model.configure_quantization(bits_w=2, keep_edge_layers_fp=False)
    path = save_model(model, tmp_path / "student.npz")
    loaded = load_model(path, expected_role="student")
    x = rng.normal(size=(9, 4))
    assert loaded.arch == model.arch
    assert loaded.weight_quant == model.weight_quant
    np.testing.assert_array_equal(loaded.predict(x), model.predict(x))


def test_load_model_format_errors(tmp_path):
    path = save_model(init_model([2, 2], seed=0), tmp_path / "t.npz", role="teacher")
    with pytest.raises(FormatError):
        load_model(path, expected_role="student")

    bare = tmp_path / "bare.npz"
    with open(bare, "wb") as fh:
        np.savez(fh, w0=np.zeros((2, 2)))
    with pytest.raises(FormatError):
        load_model(bare)


def test_train_epoch_reduces_loss_on_separable_data(rng):
    labels = np.repeat([0, 1], 30)
    features = np.where(labels[:, None] == 0, -1.0, 1.0) + rng.normal(scale=0.1, size=(60, 2))
    targets = _one_hot(labels, 2)
    model = init_model([2, 8, 2], seed=0)
    order = np.arange(60)
    def run():
        return train_epoch(model, features, targets, labels, order, 0.1, 10, mode="fp")

    first = run()
    for _ in range(20):
        last = run()
    assert first.finite and last.finite
    assert last.mean_loss < first.mean_loss
    assert last.accuracy >= 0.95
    assert first.steps == 6 and first.samples == 60


def test_train_epoch_respects_step_budget(rng):
    model = init_model([2, 2], seed=0)
    features = rng.normal(size=(40, 2))
    labels = rng.integers(0, 2, size=40)
    stats = train_epoch(
        model, features, _one_hot(labels, 2), labels, np.arange(40), 0.1, 8, max_steps=2
    )
    assert stats.steps == 2 and stats.samples == 16
