import numpy as np
import pytest

from maya.errors import ShapeError, SpecError
from maya.nn import (
    AvgPool2d,
    Conv2d,
    FullyConnected,
    Inception,
    InceptionSpec,
    L2Normalize,
    LayerSpec,
    MaxPool2d,
    Softmax,
    build_network,
    cross_entropy_loss,
    l2_normalize,
    softmax,
)

rng = np.random.default_rng(1234)


def conv_oracle(x, w, b, k, stride, padding):
    """Direct quadruple-loop convolution."""
    n, h, wd, c = x.shape
    oc = w.shape[3]

    def axis(extent):
        if padding == "same":
            out = -(-extent // stride)
            total = max((out - 1) * stride + k - extent, 0)
            return out, total // 2, total - total // 2
        return (extent - k) // stride + 1, 0, 0

    oh, pt, pb = axis(h)
    ow, pl, pr = axis(wd)
    xp = np.pad(x, ((0, 0), (pt, pb), (pl, pr), (0, 0)))
    y = np.zeros((n, oh, ow, oc))
    for ni in range(n):
        for i in range(oh):
            for j in range(ow):
                for o in range(oc):
                    acc = 0.0
                    for ki in range(k):
                        for kj in range(k):
                            for ci in range(c):
                                acc += xp[ni, i * stride + ki, j * stride + kj, ci] * w[ki, kj, ci, o]
                    y[ni, i, j, o] = acc + b[o]
    return y


def pool_oracle(x, k, stride, padding, mode):
    """Brute-force window scan for max/avg pooling."""
    n, h, w, c = x.shape

    def axis(extent):
        if padding == "same":
            out = -(-extent // stride)
            total = max((out - 1) * stride + k - extent, 0)
            return out, total // 2
        return (extent - k) // stride + 1, 0

    oh, pt = axis(h)
    ow, pl = axis(w)
    y = np.zeros((n, oh, ow, c))
    for ni in range(n):
        for i in range(oh):
            for j in range(ow):
                for ci in range(c):
                    vals = []
                    for ki in range(k):
                        for kj in range(k):
                            r = i * stride + ki - pt
                            s = j * stride + kj - pl
                            if 0 <= r < h and 0 <= s < w:
                                vals.append(x[ni, r, s, ci])
                    y[ni, i, j, ci] = max(vals) if mode == "max" else sum(vals) / len(vals)
    return y


class TestConv:
    def test_table_shape_conv1(self):
        conv = Conv2d(1, 64, k=7, stride=2, rng=rng)
        out = conv.forward(np.zeros((1, 96, 96, 1)))
        assert out.shape == (1, 48, 48, 64)

    def test_identity_1x1(self):
        conv = Conv2d(1, 1, k=1, stride=1, rng=rng)
        conv.weight.value[...] = 1.0
        conv.bias.value[...] = 0.0
        x = rng.standard_normal((2, 5, 5, 1))
        assert np.allclose(conv.forward(x), x)

    @pytest.mark.parametrize("k,stride,padding", [(3, 1, "same"), (3, 2, "same"),
                                                  (5, 2, "same"), (3, 1, "valid")])
    def test_matches_quadruple_loop(self, k, stride, padding):
        x = rng.standard_normal((2, 5, 5, 2))
        conv = Conv2d(2, 3, k=k, stride=stride, padding=padding, rng=rng)
        got = conv.forward(x)
        want = conv_oracle(x, conv.weight.value, conv.bias.value, k, stride, padding)
        assert np.allclose(got, want, atol=1e-6)

    def test_shape_mismatch(self):
        conv = Conv2d(3, 4, k=3, rng=rng)
        with pytest.raises(ShapeError):
            conv.forward(np.zeros((1, 8, 8, 2)))


class TestPooling:
    def test_table_shape_maxpool(self):
        pool = MaxPool2d(3, 2)
        assert pool.forward(np.zeros((1, 48, 48, 64))).shape == (1, 24, 24, 64)

    def test_avgpool_6_shape(self):
        pool = AvgPool2d(3, 1, padding="valid")
        assert pool.forward(np.zeros((1, 3, 3, 50))).shape == (1, 1, 1, 50)

    def test_constant_input_both_pools(self):
        x = np.full((1, 6, 6, 2), 3.5)
        assert np.allclose(MaxPool2d(3, 2).forward(x), 3.5)
        assert np.allclose(AvgPool2d(3, 2, padding="same").forward(x), 3.5)
        assert np.allclose(AvgPool2d(2, 2, padding="valid").forward(x), 3.5)

    @pytest.mark.parametrize("mode", ["max", "avg"])
    @pytest.mark.parametrize("k,stride,padding", [(2, 2, "valid"), (3, 2, "same"), (3, 1, "same")])
    def test_matches_window_scan(self, mode, k, stride, padding):
        x = rng.standard_normal((2, 4, 4, 1))
        layer = (MaxPool2d if mode == "max" else AvgPool2d)(k, stride, padding=padding)
        assert np.allclose(layer.forward(x), pool_oracle(x, k, stride, padding, mode))


class TestInception:
    def test_inception3_shape(self):
        spec = InceptionSpec(8, 12, 16, 2, 4, 4)
        layer = Inception(192, spec, rng=rng)
        out = layer.forward(rng.standard_normal((1, 6, 6, 192)))
        assert out.shape == (1, 6, 6, 32)

    def test_inception5_shape(self):
        spec = InceptionSpec(24, 12, 12, 2, 6, 8)
        layer = Inception(32, spec, rng=rng)
        out = layer.forward(rng.standard_normal((1, 3, 3, 32)))
        assert out.shape == (1, 3, 3, 50)

    def test_output_channels_sum_branches(self):
        spec = InceptionSpec(3, 2, 5, 1, 4, 2)
        assert spec.out_channels == 3 + 5 + 4 + 2
        layer = Inception(6, spec, rng=rng)
        out = layer.forward(rng.standard_normal((1, 4, 4, 6)))
        assert out.shape[3] == spec.out_channels

    def test_concatenation_is_branchwise(self):
        spec = InceptionSpec(2, 2, 3, 1, 2, 1)
        layer = Inception(4, spec, rng=rng)
        x = rng.standard_normal((1, 4, 4, 4))
        out = layer.forward(x)
        b1 = layer.b1.forward(x)
        assert np.array_equal(out[..., :2], b1)

    def test_invalid_branch_width(self):
        with pytest.raises(SpecError):
            InceptionSpec(0, 1, 1, 1, 1, 1)


class TestVectorOps:
    def test_softmax_uniform(self):
        p = softmax(np.zeros(7))
        assert np.allclose(p, 1 / 7)

    def test_softmax_sums_to_one(self):
        x = rng.standard_normal((10, 7)) * 20
        p = softmax(x)
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
        assert (p > 0).all()

    def test_softmax_stabilized(self):
        p = softmax(np.array([1000.0, 0.0, 0.0]))
        assert np.isfinite(p).all()
        assert p[0] == pytest.approx(1.0)

    def test_softmax_shift_invariance(self):
        x = rng.standard_normal(7)
        assert np.allclose(softmax(x), softmax(x + 123.456), atol=1e-9)

    def test_l2_normalize_345(self):
        v = np.zeros(10)
        v[0], v[1] = 3.0, 4.0
        out = l2_normalize(v)
        assert out[0] == pytest.approx(0.6)
        assert out[1] == pytest.approx(0.8)
        assert np.linalg.norm(out) == pytest.approx(1.0)

    def test_l2_normalize_zero_vector(self):
        assert not l2_normalize(np.zeros(5)).any()

    def test_l2norm_layer_batch(self):
        layer = L2Normalize()
        x = rng.standard_normal((4, 6))
        out = layer.forward(x)
        assert np.allclose(np.linalg.norm(out, axis=1), 1.0)


class TestCrossEntropy:
    def test_perfect_prediction(self):
        probs = np.zeros(7)
        probs[3] = 1.0
        assert cross_entropy_loss(probs, 3) == 0.0

    def test_uniform(self):
        assert cross_entropy_loss(np.full(7, 1 / 7), 0) == pytest.approx(np.log(7))

    def test_clamped_zero(self):
        probs = np.zeros(7)
        probs[0] = 1.0
        assert cross_entropy_loss(probs, 6) == pytest.approx(-np.log(1e-12))

    def test_label_out_of_range(self):
        with pytest.raises(ShapeError):
            cross_entropy_loss(np.full(7, 1 / 7), 7)


class TestFullyConnected:
    def test_affine(self):
        fc = FullyConnected(3, 2, rng=rng)
        x = rng.standard_normal((5, 3))
        assert np.allclose(fc.forward(x), x @ fc.weight.value + fc.bias.value)

    def test_flattens_spatial_input(self):
        fc = FullyConnected(8, 4, rng=rng)
        out = fc.forward(rng.standard_normal((2, 2, 2, 2)))
        assert out.shape == (2, 4)

    def test_feature_mismatch(self):
        fc = FullyConnected(10, 4, rng=rng)
        with pytest.raises(ShapeError):
            fc.forward(np.zeros((1, 9)))


class TestSpecs:
    def test_illegal_field_combinations(self):
        with pytest.raises(SpecError):
            LayerSpec(kind="l2norm", k=3)
        with pytest.raises(SpecError):
            LayerSpec(kind="conv", k=3, stride=1)  # missing channels
        with pytest.raises(SpecError):
            LayerSpec(kind="nonsense")

    def test_spec_dict_roundtrip(self):
        spec = LayerSpec(kind="inception", name="inc", in_channels=8,
                         branches=InceptionSpec(1, 2, 3, 1, 2, 1))
        assert LayerSpec.from_dict(spec.to_dict()) == spec

    def test_build_deterministic(self):
        specs = [LayerSpec(kind="fully_connected", in_features=4, out_features=3, relu=True)]
        a = build_network(specs, seed=9)
        b = build_network(specs, seed=9)
        assert np.array_equal(a.params()[0].value, b.params()[0].value)
        c = build_network(specs, seed=10)
        assert not np.array_equal(a.params()[0].value, c.params()[0].value)
