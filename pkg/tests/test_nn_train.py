import numpy as np
import pytest

from maya.errors import TrainingDivergedError
from maya.nn import (
    Adam,
    AdamConfig,
    LayerSpec,
    TrainConfig,
    adam_update,
    build_network,
    train,
)
from maya.nn.layers import Param


class TestAdam:
    def test_zero_gradient_leaves_params(self):
        p = Param("w", np.array([1.0, -2.0, 3.0]))
        opt = Adam([p], AdamConfig())
        for _ in range(5):
            p.grad[...] = 0.0
            opt.step()
        assert np.array_equal(p.value, [1.0, -2.0, 3.0])
        assert np.abs(opt.m[0]).max() == 0.0

    def test_first_step_magnitude_is_learning_rate(self):
        # constant gradient g: first update = lr * g / (|g| + eps) ~ lr * sign(g)
        p = Param("w", np.array([0.0, 0.0]))
        p.grad[...] = np.array([0.5, -3.0])
        opt = Adam([p], AdamConfig(learning_rate=0.001))
        opt.step()
        assert p.value[0] == pytest.approx(-0.001, rel=1e-6)
        assert p.value[1] == pytest.approx(0.001, rel=1e-6)

    def test_determinism(self):
        def run():
            p = Param("w", np.array([0.3, 0.7]))
            opt = Adam([p], AdamConfig())
            for i in range(10):
                p.grad[...] = np.array([0.1 * i, -0.2])
                opt.step()
            return p.value.copy()

        assert np.array_equal(run(), run())

    def test_functional_update_matches_hand_formula(self):
        config = AdamConfig(learning_rate=0.01)
        value = np.array([1.0])
        grad = np.array([2.0])
        m = np.zeros(1)
        v = np.zeros(1)
        new_value, m, v = adam_update(value, grad, m, v, step=1, config=config)
        m_hat = (0.1 * 2.0) / (1 - 0.9)
        v_hat = (0.001 * 4.0) / (1 - 0.999)
        expected = 1.0 - 0.01 * m_hat / (np.sqrt(v_hat) + config.epsilon)
        assert new_value[0] == pytest.approx(expected, rel=1e-12)

    def test_moments_decay_toward_zero(self):
        p = Param("w", np.array([1.0]))
        opt = Adam([p], AdamConfig())
        p.grad[...] = 1.0
        opt.step()
        m_after_one = opt.m[0].copy()
        for _ in range(20):
            p.grad[...] = 0.0
            opt.step()
        assert np.abs(opt.m[0]).max() < np.abs(m_after_one).max() * 0.2


def two_blob_data(n=60, seed=0):
    rng = np.random.default_rng(seed)
    x0 = rng.normal(loc=[-2.0, 0.0], scale=0.4, size=(n // 2, 2))
    x1 = rng.normal(loc=[2.0, 0.0], scale=0.4, size=(n // 2, 2))
    xs = np.vstack([x0, x1])
    ys = np.array([0] * (n // 2) + [1] * (n // 2))
    # closed-form separability: a vertical line at x=0 splits the blobs
    assert ((xs[:, 0] > 0).astype(int) == ys).mean() >= 0.99
    return xs, ys


def tiny_classifier(seed=0):
    specs = [
        LayerSpec(kind="fully_connected", in_features=2, out_features=8, relu=True),
        LayerSpec(kind="fully_connected", in_features=8, out_features=2),
        LayerSpec(kind="softmax"),
    ]
    return build_network(specs, seed=seed)


class TestTrainLoop:
    def test_separable_toy_reaches_99_percent(self):
        xs, ys = two_blob_data()
        net = tiny_classifier(seed=3)
        config = TrainConfig(learning_rate=0.01, batch_size=16, max_epochs=100,
                             seed=3, patience=100)
        result = train(net, xs, ys, xs, ys, config)
        assert result.metrics[-1].train_acc >= 0.99

    def test_zero_learning_rate_flat_metrics(self):
        xs, ys = two_blob_data(seed=1)
        net = tiny_classifier(seed=1)
        config = TrainConfig(learning_rate=0.0, batch_size=16, max_epochs=5,
                             seed=1, patience=50)
        result = train(net, xs, ys, xs, ys, config)
        first = result.metrics[0]
        for m in result.metrics[1:]:
            assert m.train_loss == pytest.approx(first.train_loss, abs=1e-12)
            assert m.train_acc == first.train_acc
            assert m.val_loss == pytest.approx(first.val_loss, abs=1e-12)

    def test_same_seed_identical_traces(self):
        xs, ys = two_blob_data(seed=2)

        def run():
            net = tiny_classifier(seed=5)
            config = TrainConfig(learning_rate=0.005, batch_size=8, max_epochs=6,
                                 seed=5, patience=50)
            return train(net, xs, ys, xs, ys, config).metrics

        a, b = run(), run()
        assert a == b

    def test_early_stopping_and_best_checkpoint(self):
        xs, ys = two_blob_data(seed=4)
        net = tiny_classifier(seed=4)
        config = TrainConfig(learning_rate=0.01, batch_size=16, max_epochs=100,
                             seed=4, patience=3)
        result = train(net, xs, ys, xs, ys, config)
        assert len(result.metrics) < 100  # patience fired
        assert result.best_epoch <= len(result.metrics)
        assert result.best_val_acc == max(m.val_acc for m in result.metrics)

    def test_empty_split_rejected(self):
        net = tiny_classifier()
        with pytest.raises(Exception):
            train(net, np.zeros((0, 2)), np.zeros(0, dtype=int), np.zeros((1, 2)),
                  np.zeros(1, dtype=int), TrainConfig())

    def test_divergence_aborts_with_diagnostic(self):
        xs, ys = two_blob_data(seed=6)
        net = tiny_classifier(seed=6)
        net.params()[-2].value[...] = np.nan  # head weights; no relu to mask it
        with pytest.raises(TrainingDivergedError, match="epoch 1"):
            train(net, xs, ys, xs, ys, TrainConfig(max_epochs=2, seed=6))
