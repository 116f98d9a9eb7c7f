"""Declarative layer specs and the sequential network container."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import SpecError
from .layers import (
    AvgPool2d,
    Conv2d,
    FullyConnected,
    Inception,
    L2Normalize,
    Layer,
    MaxPool2d,
    Param,
    Softmax,
)

LAYER_KINDS = ("conv", "maxpool", "avgpool", "inception", "fully_connected", "l2norm", "softmax")


@dataclass(frozen=True)
class InceptionSpec:
    """Branch widths of one inception block."""

    one_by_one: int
    reduce3: int
    three_by_three: int
    reduce5: int
    five_by_five: int
    pool_proj: int

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 1:
                raise SpecError(f"inception branch {name} must be positive, got {value}")

    @property
    def out_channels(self) -> int:
        return self.one_by_one + self.three_by_three + self.five_by_five + self.pool_proj

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, doc: dict) -> "InceptionSpec":
        return cls(**doc)


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network, as data. Field legality depends on kind."""

    kind: str
    name: Optional[str] = None
    k: Optional[int] = None
    stride: Optional[int] = None
    padding: Optional[str] = None
    in_channels: Optional[int] = None
    out_channels: Optional[int] = None
    relu: bool = False
    in_features: Optional[int] = None
    out_features: Optional[int] = None
    branches: Optional[InceptionSpec] = None

    _REQUIRED = {
        "conv": ("k", "stride", "in_channels", "out_channels"),
        "maxpool": ("k", "stride"),
        "avgpool": ("k", "stride"),
        "inception": ("in_channels", "branches"),
        "fully_connected": ("in_features", "out_features"),
        "l2norm": (),
        "softmax": (),
    }
    _ALLOWED = {
        "conv": ("k", "stride", "padding", "in_channels", "out_channels", "relu"),
        "maxpool": ("k", "stride", "padding"),
        "avgpool": ("k", "stride", "padding"),
        "inception": ("in_channels", "branches"),
        "fully_connected": ("in_features", "out_features", "relu"),
        "l2norm": (),
        "softmax": (),
    }

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise SpecError(f"unknown layer kind {self.kind!r}")
        allowed = set(self._ALLOWED[self.kind]) | {"kind", "name"}
        for fname, value in self.__dict__.items():
            if fname in allowed:
                continue
            default = False if fname == "relu" else None
            if value != default:
                raise SpecError(f"{self.kind} layer does not accept field {fname!r}")
        for fname in self._REQUIRED[self.kind]:
            if getattr(self, fname) is None:
                raise SpecError(f"{self.kind} layer requires field {fname!r}")

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        for fname in ("name", "k", "stride", "padding", "in_channels", "out_channels",
                      "in_features", "out_features"):
            value = getattr(self, fname)
            if value is not None:
                doc[fname] = value
        if self.relu:
            doc["relu"] = True
        if self.branches is not None:
            doc["branches"] = self.branches.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "LayerSpec":
        doc = dict(doc)
        branches = doc.pop("branches", None)
        if branches is not None:
            doc["branches"] = InceptionSpec.from_dict(branches)
        return cls(**doc)


def build_layer(spec: LayerSpec, rng: np.random.Generator) -> Layer:
    name = spec.name or spec.kind
    if spec.kind == "conv":
        return Conv2d(spec.in_channels, spec.out_channels, spec.k, spec.stride,
                      spec.padding or "same", spec.relu, rng, name)
    if spec.kind == "maxpool":
        return MaxPool2d(spec.k, spec.stride, spec.padding or "same", name)
    if spec.kind == "avgpool":
        return AvgPool2d(spec.k, spec.stride, spec.padding or "valid", name)
    if spec.kind == "inception":
        return Inception(spec.in_channels, spec.branches, rng, name)
    if spec.kind == "fully_connected":
        return FullyConnected(spec.in_features, spec.out_features, spec.relu, rng, name)
    if spec.kind == "l2norm":
        return L2Normalize(name)
    if spec.kind == "softmax":
        return Softmax(name)
    raise SpecError(f"unknown layer kind {spec.kind!r}")


class Network:
    """A sequential stack of layers built from LayerSpecs."""

    def __init__(self, specs: list[LayerSpec], seed: int = 0):
        self.specs = list(specs)
        rng = np.random.default_rng(seed)
        self.layers = [build_layer(spec, rng) for spec in self.specs]

    def params(self) -> list[Param]:
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def zero_grad(self) -> None:
        for p in self.params():
            p.grad[...] = 0.0

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, train)
        return x

    def forward_collect(self, x: np.ndarray) -> list[np.ndarray]:
        """Inference pass returning every layer's output, in order."""
        outputs = []
        for layer in self.layers:
            x = layer.forward(x, train=False)
            outputs.append(x)
        return outputs

    def backward(self, dout: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def trace(self, x: np.ndarray) -> list[tuple[str, tuple]]:
        """(layer name, output shape without the batch axis) for a probe input."""
        shapes = []
        for layer in self.layers:
            x = layer.forward(x, train=False)
            shapes.append((layer.name, tuple(x.shape[1:])))
        return shapes

    def param_count(self) -> tuple[list[tuple[str, int]], int]:
        """Per-layer trainable parameter counts plus the total."""
        rows = []
        total = 0
        for layer in self.layers:
            count = sum(p.size for p in layer.params())
            rows.append((layer.name, count))
            total += count
        return rows, total

    def get_weights(self) -> list[np.ndarray]:
        return [p.value.copy() for p in self.params()]

    def set_weights(self, weights: list[np.ndarray]) -> None:
        params = self.params()
        if len(weights) != len(params):
            raise SpecError(f"expected {len(params)} weight arrays, got {len(weights)}")
        for p, w in zip(params, weights):
            if p.value.shape != w.shape:
                raise SpecError(f"shape mismatch for {p.name}: {p.value.shape} vs {w.shape}")
            p.value[...] = w


def build_network(specs: list[LayerSpec], seed: int = 0) -> Network:
    return Network(specs, seed)


def format_kcount(count: int) -> str:
    """Round a parameter count to 0.1K, dropping a trailing .0 (7.0K -> 7K)."""
    value = count / 1000.0
    text = f"{value:.1f}"
    if text.endswith(".0"):
        text = text[:-2]
    return f"{text}K"
