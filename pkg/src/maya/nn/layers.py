"""Layer implementations with explicit forward/backward passes.

Spatial tensors are (N, H, W, C) float64. Convolution and pooling share one
padding rule: ``same`` pads so the output extent is ceil(H / stride) (TF-style
asymmetric split), ``valid`` applies no padding. Forward passes cache
intermediates only when ``train=True``; inference is stateless so a loaded
model can serve concurrent calls.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import ShapeError


class Param:
    """One trainable array with its gradient accumulator."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name: str, value: np.ndarray):
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)

    @property
    def size(self) -> int:
        return self.value.size


def he_uniform(rng: np.random.Generator, shape: tuple, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def _pad_amounts(extent: int, k: int, stride: int, padding: str) -> tuple[int, int, int]:
    """Return (out_extent, pad_before, pad_after) for one spatial axis."""
    if padding == "same":
        out = -(-extent // stride)
        total = max((out - 1) * stride + k - extent, 0)
        return out, total // 2, total - total // 2
    if padding == "valid":
        if extent < k:
            raise ShapeError(f"input extent {extent} smaller than kernel {k} (valid padding)")
        return (extent - k) // stride + 1, 0, 0
    raise ShapeError(f"unknown padding {padding!r}")


def _window_view(xp: np.ndarray, k: int, stride: int, oh: int, ow: int) -> np.ndarray:
    """Gather k*k shifted slices: (N, oh, ow, k, k, C). Copies, not a view."""
    n, _, _, c = xp.shape
    cols = np.empty((n, oh, ow, k, k, c), dtype=xp.dtype)
    for ki in range(k):
        for kj in range(k):
            cols[:, :, :, ki, kj, :] = xp[
                :, ki : ki + (oh - 1) * stride + 1 : stride,
                kj : kj + (ow - 1) * stride + 1 : stride, :,
            ]
    return cols


def _scatter_windows(
    dcols: np.ndarray, padded_shape: tuple, k: int, stride: int, oh: int, ow: int
) -> np.ndarray:
    """Adjoint of _window_view: accumulate window gradients into the padded input."""
    dxp = np.zeros(padded_shape, dtype=dcols.dtype)
    for ki in range(k):
        for kj in range(k):
            dxp[
                :, ki : ki + (oh - 1) * stride + 1 : stride,
                kj : kj + (ow - 1) * stride + 1 : stride, :,
            ] += dcols[:, :, :, ki, kj, :]
    return dxp


class Layer:
    name: str = ""

    def params(self) -> list[Param]:
        return []

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Conv2d(Layer):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        k: int,
        stride: int = 1,
        padding: str = "same",
        relu: bool = False,
        rng: Optional[np.random.Generator] = None,
        name: str = "conv",
    ):
        self.name = name
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.k = k
        self.stride = stride
        self.padding = padding
        self.relu = relu
        rng = rng or np.random.default_rng()
        fan_in = k * k * in_channels
        self.weight = Param(f"{name}.weight", he_uniform(rng, (k, k, in_channels, out_channels), fan_in))
        self.bias = Param(f"{name}.bias", np.zeros(out_channels))
        self._cache = None

    def params(self) -> list[Param]:
        return [self.weight, self.bias]

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if x.ndim != 4 or x.shape[3] != self.in_channels:
            raise ShapeError(
                f"{self.name}: expected (N,H,W,{self.in_channels}), got {x.shape}"
            )
        n, h, w, _ = x.shape
        oh, pt, pb = _pad_amounts(h, self.k, self.stride, self.padding)
        ow, pl, pr = _pad_amounts(w, self.k, self.stride, self.padding)
        xp = np.pad(x, ((0, 0), (pt, pb), (pl, pr), (0, 0)))
        cols = _window_view(xp, self.k, self.stride, oh, ow)
        cols2d = cols.reshape(n * oh * ow, -1)
        w2d = self.weight.value.reshape(-1, self.out_channels)
        y = (cols2d @ w2d + self.bias.value).reshape(n, oh, ow, self.out_channels)
        if self.relu:
            mask = y > 0
            y = np.where(mask, y, 0.0)
        else:
            mask = None
        if train:
            self._cache = (cols2d, xp.shape, (pt, pl), (h, w), (oh, ow), mask)
        return y

    def backward(self, dout: np.ndarray) -> np.ndarray:
        cols2d, padded_shape, (pt, pl), (h, w), (oh, ow), mask = self._cache
        if mask is not None:
            dout = np.where(mask, dout, 0.0)
        n = dout.shape[0]
        dy2d = dout.reshape(n * oh * ow, self.out_channels)
        w2d = self.weight.value.reshape(-1, self.out_channels)
        self.weight.grad += (cols2d.T @ dy2d).reshape(self.weight.value.shape)
        self.bias.grad += dy2d.sum(axis=0)
        dcols = (dy2d @ w2d.T).reshape(n, oh, ow, self.k, self.k, self.in_channels)
        dxp = _scatter_windows(dcols, padded_shape, self.k, self.stride, oh, ow)
        return dxp[:, pt : pt + h, pl : pl + w, :]


class MaxPool2d(Layer):
    def __init__(self, k: int, stride: int, padding: str = "same", name: str = "maxpool"):
        self.name = name
        self.k = k
        self.stride = stride
        self.padding = padding
        self._cache = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if x.ndim != 4:
            raise ShapeError(f"{self.name}: expected (N,H,W,C), got {x.shape}")
        n, h, w, c = x.shape
        oh, pt, pb = _pad_amounts(h, self.k, self.stride, self.padding)
        ow, pl, pr = _pad_amounts(w, self.k, self.stride, self.padding)
        xp = np.pad(x, ((0, 0), (pt, pb), (pl, pr), (0, 0)), constant_values=-np.inf)
        windows = _window_view(xp, self.k, self.stride, oh, ow).reshape(
            n, oh, ow, self.k * self.k, c
        )
        best = windows.argmax(axis=3)
        y = np.take_along_axis(windows, best[:, :, :, None, :], axis=3)[:, :, :, 0, :]
        if train:
            self._cache = (best, xp.shape, (pt, pl), (h, w), (oh, ow))
        return y

    def backward(self, dout: np.ndarray) -> np.ndarray:
        best, padded_shape, (pt, pl), (h, w), (oh, ow) = self._cache
        n, _, _, c = dout.shape
        dwin = np.zeros((n, oh, ow, self.k * self.k, c), dtype=dout.dtype)
        np.put_along_axis(dwin, best[:, :, :, None, :], dout[:, :, :, None, :], axis=3)
        dxp = _scatter_windows(
            dwin.reshape(n, oh, ow, self.k, self.k, c), padded_shape, self.k, self.stride, oh, ow
        )
        return dxp[:, pt : pt + h, pl : pl + w, :]


class AvgPool2d(Layer):
    """Mean pooling; padded cells are excluded from each window's denominator."""

    def __init__(self, k: int, stride: int, padding: str = "valid", name: str = "avgpool"):
        self.name = name
        self.k = k
        self.stride = stride
        self.padding = padding
        self._cache = None

    def _counts(self, h: int, w: int, oh: int, ow: int, pads: tuple) -> np.ndarray:
        pt, pb, pl, pr = pads
        ones = np.pad(np.ones((1, h, w, 1)), ((0, 0), (pt, pb), (pl, pr), (0, 0)))
        wins = _window_view(ones, self.k, self.stride, oh, ow)
        return wins.reshape(1, oh, ow, -1).sum(axis=3)[0][:, :, None]

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if x.ndim != 4:
            raise ShapeError(f"{self.name}: expected (N,H,W,C), got {x.shape}")
        n, h, w, c = x.shape
        oh, pt, pb = _pad_amounts(h, self.k, self.stride, self.padding)
        ow, pl, pr = _pad_amounts(w, self.k, self.stride, self.padding)
        xp = np.pad(x, ((0, 0), (pt, pb), (pl, pr), (0, 0)))
        windows = _window_view(xp, self.k, self.stride, oh, ow).reshape(
            n, oh, ow, self.k * self.k, c
        )
        counts = self._counts(h, w, oh, ow, (pt, pb, pl, pr))
        y = windows.sum(axis=3) / counts
        if train:
            self._cache = (counts, xp.shape, (pt, pl), (h, w), (oh, ow))
        return y

    def backward(self, dout: np.ndarray) -> np.ndarray:
        counts, padded_shape, (pt, pl), (h, w), (oh, ow) = self._cache
        n, _, _, c = dout.shape
        spread = (dout / counts)[:, :, :, None, :]
        dwin = np.broadcast_to(spread, (n, oh, ow, self.k * self.k, c))
        dxp = _scatter_windows(
            dwin.reshape(n, oh, ow, self.k, self.k, c), padded_shape, self.k, self.stride, oh, ow
        )
        return dxp[:, pt : pt + h, pl : pl + w, :]


class FullyConnected(Layer):
    def __init__(
        self,
        in_features: int,
        out_features: int,
        relu: bool = False,
        rng: Optional[np.random.Generator] = None,
        name: str = "fc",
    ):
        self.name = name
        self.in_features = in_features
        self.out_features = out_features
        self.relu = relu
        rng = rng or np.random.default_rng()
        self.weight = Param(f"{name}.weight", he_uniform(rng, (in_features, out_features), in_features))
        self.bias = Param(f"{name}.bias", np.zeros(out_features))
        self._cache = None

    def params(self) -> list[Param]:
        return [self.weight, self.bias]

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        flat = x.reshape(x.shape[0], -1)
        if flat.shape[1] != self.in_features:
            raise ShapeError(f"{self.name}: expected {self.in_features} features, got {flat.shape[1]}")
        y = flat @ self.weight.value + self.bias.value
        if self.relu:
            mask = y > 0
            y = np.where(mask, y, 0.0)
        else:
            mask = None
        if train:
            self._cache = (flat, x.shape, mask)
        return y

    def backward(self, dout: np.ndarray) -> np.ndarray:
        flat, in_shape, mask = self._cache
        if mask is not None:
            dout = np.where(mask, dout, 0.0)
        self.weight.grad += flat.T @ dout
        self.bias.grad += dout.sum(axis=0)
        return (dout @ self.weight.value.T).reshape(in_shape)


class L2Normalize(Layer):
    """Row-wise scaling to unit Euclidean norm; a zero row stays zero."""

    def __init__(self, name: str = "l2norm"):
        self.name = name
        self._cache = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        flat = x.reshape(x.shape[0], -1)
        norms = np.linalg.norm(flat, axis=1, keepdims=True)
        safe = np.where(norms > 0.0, norms, 1.0)
        y = flat / safe
        if train:
            self._cache = (y, safe, norms > 0.0)
        return y

    def backward(self, dout: np.ndarray) -> np.ndarray:
        u, safe, nonzero = self._cache
        inner = (dout * u).sum(axis=1, keepdims=True)
        dx = (dout - u * inner) / safe
        return np.where(nonzero, dx, 0.0)


class Softmax(Layer):
    def __init__(self, name: str = "softmax"):
        self.name = name
        self._cache = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        shifted = x - x.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        p = e / e.sum(axis=1, keepdims=True)
        if train:
            self._cache = p
        return p

    def backward(self, dout: np.ndarray) -> np.ndarray:
        p = self._cache
        inner = (dout * p).sum(axis=1, keepdims=True)
        return p * (dout - inner)


class Inception(Layer):
    """Four parallel branches concatenated along channels.

    Branches: 1x1 conv; 1x1 reduce then 3x3 conv; 1x1 reduce then 5x5 conv;
    3x3/1 max pool then 1x1 projection. Every convolution is ReLU-activated
    and spatial size is preserved.
    """

    def __init__(self, in_channels: int, spec, rng: Optional[np.random.Generator] = None,
                 name: str = "inception"):
        self.name = name
        self.in_channels = in_channels
        self.spec = spec
        rng = rng or np.random.default_rng()

        def conv(sub, in_ch, out_ch, k):
            return Conv2d(in_ch, out_ch, k, stride=1, padding="same", relu=True,
                          rng=rng, name=f"{name}.{sub}")

        self.b1 = conv("1x1", in_channels, spec.one_by_one, 1)
        self.b2_reduce = conv("3x3reduce", in_channels, spec.reduce3, 1)
        self.b2 = conv("3x3", spec.reduce3, spec.three_by_three, 3)
        self.b3_reduce = conv("5x5reduce", in_channels, spec.reduce5, 1)
        self.b3 = conv("5x5", spec.reduce5, spec.five_by_five, 5)
        self.b4_pool = MaxPool2d(3, 1, padding="same", name=f"{name}.pool")
        self.b4_proj = conv("poolproj", in_channels, spec.pool_proj, 1)
        self._splits = np.cumsum([spec.one_by_one, spec.three_by_three, spec.five_by_five])

    def sublayers(self) -> list[Layer]:
        return [self.b1, self.b2_reduce, self.b2, self.b3_reduce, self.b3, self.b4_pool, self.b4_proj]

    def params(self) -> list[Param]:
        out = []
        for layer in self.sublayers():
            out.extend(layer.params())
        return out

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        y1 = self.b1.forward(x, train)
        y2 = self.b2.forward(self.b2_reduce.forward(x, train), train)
        y3 = self.b3.forward(self.b3_reduce.forward(x, train), train)
        y4 = self.b4_proj.forward(self.b4_pool.forward(x, train), train)
        return np.concatenate([y1, y2, y3, y4], axis=3)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        d1, d2, d3, d4 = np.split(dout, self._splits, axis=3)
        dx = self.b1.backward(d1)
        dx = dx + self.b2_reduce.backward(self.b2.backward(d2))
        dx = dx + self.b3_reduce.backward(self.b3.backward(d3))
        dx = dx + self.b4_pool.backward(self.b4_proj.backward(d4))
        return dx
