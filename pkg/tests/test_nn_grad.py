"""Analytic gradients vs central finite differences, layer by layer.

Each check wraps a single layer (or composed block) in a scalar loss with
fixed random projection weights, perturbs inputs and parameters with step
1e-3, and demands relative error <= 1e-3 elementwise on sampled entries.
"""

import numpy as np
import pytest

from maya.nn import (
    AvgPool2d,
    Conv2d,
    FullyConnected,
    Inception,
    InceptionSpec,
    L2Normalize,
    MaxPool2d,
    Softmax,
    cross_entropy_batch,
)

STEP = 1e-3
RTOL = 1e-3


def scalar_loss(layer, x, proj):
    """Deterministic scalar readout: sum(proj * layer(x))."""
    return float((layer.forward(x, train=False) * proj).sum())


def check_layer_gradients(layer, x, rng, samples=8, piecewise_linear=True):
    """Compare backward() against central differences on sampled entries.

    Conv/pool/fc stacks are piecewise linear in any single scalar, so away
    from ReLU/argmax kinks the one-sided differences agree exactly; a
    mismatch marks a kink sample, which central differences cannot grade.
    Smooth layers (softmax, l2norm) skip that filter.
    """
    # zero-initialized biases sit exactly on the ReLU kink when an input
    # window is all zeros (upstream ReLU + zero padding); shift off it
    for p in layer.params():
        p.value += rng.uniform(0.01, 0.08, size=p.value.shape)

    proj = rng.standard_normal(layer.forward(x, train=False).shape)

    for p in layer.params():
        p.grad[...] = 0.0
    layer.forward(x, train=True)
    dx = layer.backward(proj)

    def rel_err(a, b):
        return abs(a - b) / max(abs(a), abs(b), 1e-6)

    def compare(array, grad):
        flat = array.ravel()
        gflat = grad.ravel()
        idx = rng.choice(flat.size, size=min(samples, flat.size), replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + STEP
            plus = scalar_loss(layer, x, proj)
            flat[i] = orig - STEP
            minus = scalar_loss(layer, x, proj)
            flat[i] = orig
            base = scalar_loss(layer, x, proj)
            fd = (plus - minus) / (2.0 * STEP)
            if piecewise_linear:
                fwd = (plus - base) / STEP
                bwd = (base - minus) / STEP
                if abs(fwd - bwd) > 1e-5 * max(1.0, abs(fd)):
                    # perturbation straddles a ReLU/argmax kink: the central
                    # difference is invalid, but the analytic subgradient
                    # must equal one of the one-sided slopes
                    assert min(rel_err(fwd, gflat[i]), rel_err(bwd, gflat[i])) <= RTOL, (
                        f"{layer.name}: kink slopes {fwd}/{bwd} vs analytic {gflat[i]}"
                    )
                    continue
            assert rel_err(fd, gflat[i]) <= RTOL, (
                f"{layer.name}: fd {fd} vs analytic {gflat[i]}"
            )

    compare(x, dx)
    for p in layer.params():
        compare(p.value, p.grad)


@pytest.mark.parametrize("trial", range(20))
def test_conv_gradients(trial):
    rng = np.random.default_rng(100 + trial)
    k = int(rng.choice([1, 3, 5]))
    stride = int(rng.choice([1, 2]))
    padding = str(rng.choice(["same", "valid"]))
    c_in = int(rng.integers(1, 4))
    c_out = int(rng.integers(1, 4))
    size = int(rng.integers(max(k, 4), 8))
    relu = bool(rng.integers(0, 2))
    layer = Conv2d(c_in, c_out, k=k, stride=stride, padding=padding, relu=relu, rng=rng)
    x = rng.standard_normal((2, size, size, c_in))
    check_layer_gradients(layer, x, rng)


@pytest.mark.parametrize("trial", range(20))
def test_maxpool_gradients(trial):
    rng = np.random.default_rng(200 + trial)
    k = int(rng.choice([2, 3]))
    stride = int(rng.choice([1, 2]))
    layer = MaxPool2d(k, stride, padding=str(rng.choice(["same", "valid"])))
    # spread values so finite differences never cross an argmax tie
    x = rng.permutation(np.arange(2 * 6 * 6 * 2, dtype=np.float64)).reshape(2, 6, 6, 2)
    check_layer_gradients(layer, x, rng)


@pytest.mark.parametrize("trial", range(20))
def test_avgpool_gradients(trial):
    rng = np.random.default_rng(300 + trial)
    k = int(rng.choice([2, 3]))
    stride = int(rng.choice([1, 2]))
    layer = AvgPool2d(k, stride, padding=str(rng.choice(["same", "valid"])))
    x = rng.standard_normal((2, 6, 6, 2))
    check_layer_gradients(layer, x, rng)


@pytest.mark.parametrize("trial", range(20))
def test_fully_connected_gradients(trial):
    rng = np.random.default_rng(400 + trial)
    layer = FullyConnected(int(rng.integers(2, 10)), int(rng.integers(2, 8)),
                           relu=bool(rng.integers(0, 2)), rng=rng)
    x = rng.standard_normal((3, layer.in_features))
    check_layer_gradients(layer, x, rng)


@pytest.mark.parametrize("trial", range(20))
def test_l2_normalize_gradients(trial):
    rng = np.random.default_rng(500 + trial)
    layer = L2Normalize()
    x = rng.standard_normal((4, 5))
    x += np.sign(x) * 0.1  # keep norms away from zero
    check_layer_gradients(layer, x, rng, piecewise_linear=False)


@pytest.mark.parametrize("trial", range(20))
def test_softmax_gradients(trial):
    rng = np.random.default_rng(600 + trial)
    layer = Softmax()
    x = rng.standard_normal((3, 7))
    check_layer_gradients(layer, x, rng, piecewise_linear=False)


@pytest.mark.parametrize("trial", range(20))
def test_inception_gradients(trial):
    rng = np.random.default_rng(700 + trial)
    spec = InceptionSpec(*(int(rng.integers(1, 4)) for _ in range(6)))
    layer = Inception(3, spec, rng=rng)
    x = rng.standard_normal((2, 5, 5, 3))
    check_layer_gradients(layer, x, rng, samples=4)


def test_cross_entropy_gradient_through_softmax():
    rng = np.random.default_rng(808)
    layer = Softmax()
    x = rng.standard_normal((4, 7))
    labels = rng.integers(0, 7, size=4)

    probs = layer.forward(x, train=True)
    _, dprobs = cross_entropy_batch(probs, labels)
    dx = layer.backward(dprobs)

    for (n, j) in [(0, 0), (1, 3), (2, 6), (3, 2)]:
        orig = x[n, j]
        x[n, j] = orig + STEP
        plus = cross_entropy_batch(layer.forward(x, train=False), labels)[0]
        x[n, j] = orig - STEP
        minus = cross_entropy_batch(layer.forward(x, train=False), labels)[0]
        x[n, j] = orig
        fd = (plus - minus) / (2 * STEP)
        denom = max(abs(fd), abs(dx[n, j]), 1e-6)
        assert abs(fd - dx[n, j]) / denom <= RTOL


def test_saturated_correct_prediction_gives_near_zero_gradients():
    # logits so confident the softmax output is one-hot at the label: loss
    # is ~0 and the gradient flowing back through softmax collapses
    layer = Softmax()
    x = np.array([[80.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
    probs = layer.forward(x, train=True)
    loss, dprobs = cross_entropy_batch(probs, np.array([0]))
    dx = layer.backward(dprobs)
    assert loss == pytest.approx(0.0, abs=1e-9)
    assert np.abs(dx).max() < 1e-9
