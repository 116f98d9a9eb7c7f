"""The expression-recognition model: assembly, prediction and evaluation.

The trunk follows the published network configuration table row for row
(two inception blocks, global average pooling, a 1024-wide 1x1 convolution,
a 48-d fully-connected embedding and L2 normalization). The table stops at
the embedding, so a 7-way affine head with softmax is appended for
classification; the head is reported separately in the parameter ledger.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DatasetError, MayaError
from .landmarks import (
    LABEL_NAMES,
    EmotionLabel,
    LandmarkSet,
    normalize,
    rasterize,
)
from .nn import InceptionSpec, LayerSpec, Network, format_kcount

NUM_CLASSES = 7
EMBEDDING_DIM = 48
TRUNK_PARAMS = 225_506
HEAD_PARAMS = EMBEDDING_DIM * NUM_CLASSES + NUM_CLASSES  # 343

MAYA_TRUNK_SPECS = [
    LayerSpec(kind="conv", name="conv-1", k=7, stride=2, in_channels=1, out_channels=64, relu=True),
    LayerSpec(kind="maxpool", name="maxpool-1", k=3, stride=2),
    LayerSpec(kind="conv", name="conv-2", k=3, stride=2, in_channels=64, out_channels=192, relu=True),
    LayerSpec(kind="maxpool", name="maxpool-2", k=3, stride=2),
    LayerSpec(kind="inception", name="inception-3", in_channels=192,
              branches=InceptionSpec(one_by_one=8, reduce3=12, three_by_three=16,
                                     reduce5=2, five_by_five=4, pool_proj=4)),
    LayerSpec(kind="maxpool", name="maxpool-4", k=3, stride=2),
    LayerSpec(kind="inception", name="inception-5", in_channels=32,
              branches=InceptionSpec(one_by_one=24, reduce3=12, three_by_three=12,
                                     reduce5=2, five_by_five=6, pool_proj=8)),
    LayerSpec(kind="avgpool", name="avgpool-6", k=3, stride=1, padding="valid"),
    LayerSpec(kind="conv", name="conv-7", k=1, stride=1, in_channels=50, out_channels=1024, relu=True),
    LayerSpec(kind="fully_connected", name="fc-8", in_features=1024, out_features=EMBEDDING_DIM, relu=True),
    LayerSpec(kind="l2norm", name="l2norm"),
]

MAYA_HEAD_SPECS = [
    LayerSpec(kind="fully_connected", name="head", in_features=EMBEDDING_DIM, out_features=NUM_CLASSES),
    LayerSpec(kind="softmax", name="softmax"),
]

# Index of the L2-normalized embedding within the full layer stack.
EMBEDDING_LAYER_INDEX = len(MAYA_TRUNK_SPECS) - 1

# Expected output shape (H, W, C) per trunk layer for a 96x96x1 probe.
TABLE_OUTPUT_SHAPES = {
    "conv-1": (48, 48, 64),
    "maxpool-1": (24, 24, 64),
    "conv-2": (12, 12, 192),
    "maxpool-2": (6, 6, 192),
    "inception-3": (6, 6, 32),
    "maxpool-4": (3, 3, 32),
    "inception-5": (3, 3, 50),
    "avgpool-6": (1, 1, 50),
    "conv-7": (1, 1, 1024),
    "fc-8": (EMBEDDING_DIM,),
    "l2norm": (EMBEDDING_DIM,),
}


@dataclass(frozen=True)
class Prediction:
    probs: np.ndarray  # (7,)
    top: EmotionLabel
    embedding: np.ndarray  # (48,), unit norm
    latency_ms: float


@dataclass
class FerModel:
    """The full network (trunk + head) with its checkpoint metadata."""

    network: Network
    meta: dict = field(default_factory=dict)

    @property
    def label_names(self) -> tuple[str, ...]:
        return LABEL_NAMES

    def param_ledger(self) -> tuple[list[tuple[str, int]], int, int]:
        """(per-layer counts, trunk total, head total)."""
        rows, _ = self.network.param_count()
        trunk_names = {spec.name for spec in MAYA_TRUNK_SPECS}
        trunk = sum(count for name, count in rows if name in trunk_names)
        head = sum(count for name, count in rows if name not in trunk_names)
        return rows, trunk, head

    def ledger_text(self) -> str:
        rows, trunk, head = self.param_ledger()
        lines = [f"{name:14s} {count:>8,}  {format_kcount(count)}"
                 for name, count in rows if count > 0]
        lines.append(f"{'trunk total':14s} {trunk:>8,}  {format_kcount(trunk)}")
        lines.append(f"{'head':14s} {head:>8,}")
        return "\n".join(lines)

    def forward_batch(self, images: np.ndarray) -> np.ndarray:
        """Class probabilities for a (N, 96, 96) or (N, 96, 96, 1) batch."""
        if images.ndim == 3:
            images = images[..., None]
        return self.network.forward(images, train=False)


def build_maya_net(seed: int = 0, meta: Optional[dict] = None) -> FerModel:
    """Deterministically initialize the full recognition network."""
    network = Network(MAYA_TRUNK_SPECS + MAYA_HEAD_SPECS, seed=seed)
    return FerModel(network=network, meta=dict(meta or {}, seed=seed))


def predict(model: FerModel, landmarks: LandmarkSet) -> Prediction:
    """Run the staged pipeline: normalize, rasterize, forward.

    Validation failures carry the pipeline stage they occurred in.
    """
    start = time.perf_counter()
    try:
        normalized = normalize(landmarks)
    except MayaError as exc:
        exc.context.setdefault("stage", "normalize")
        raise
    try:
        raster = rasterize(normalized)
    except MayaError as exc:
        exc.context.setdefault("stage", "rasterize")
        raise
    x = raster.pixels[None, :, :, None]
    outputs = model.network.forward_collect(x)
    probs = outputs[-1][0]
    embedding = outputs[EMBEDDING_LAYER_INDEX][0].copy()
    latency_ms = (time.perf_counter() - start) * 1000.0
    return Prediction(
        probs=probs,
        top=EmotionLabel(int(probs.argmax())),
        embedding=embedding,
        latency_ms=latency_ms,
    )


@dataclass
class ConfusionMatrix:
    """7x7 integer counts, rows true label, columns predicted."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (NUM_CLASSES, NUM_CLASSES):
            raise DatasetError(f"confusion matrix must be 7x7, got {self.counts.shape}")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total

    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_text(self) -> str:
        width = max(10, len(str(int(self.counts.max()))) + 2)
        header = f"{'true/pred':>10s} " + " ".join(f"{n[:width]:>{width}s}" for n in LABEL_NAMES)
        lines = [header]
        for i, name in enumerate(LABEL_NAMES):
            cells = " ".join(f"{int(c):>{width}d}" for c in self.counts[i])
            lines.append(f"{name:>10s} {cells}")
        lines.append(f"accuracy: {self.accuracy:.4f} ({int(np.trace(self.counts))}/{self.total})")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["true\\pred," + ",".join(LABEL_NAMES)]
        for i, name in enumerate(LABEL_NAMES):
            lines.append(name + "," + ",".join(str(int(c)) for c in self.counts[i]))
        return "\n".join(lines) + "\n"


def evaluate(
    model: FerModel,
    samples: Iterable[tuple[int, np.ndarray]],
    batch_size: int = 64,
) -> ConfusionMatrix:
    """Confusion matrix over (label, image) pairs; accuracy is trace/total."""
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    batch: list[np.ndarray] = []
    labels: list[int] = []

    def flush():
        if not batch:
            return
        probs = model.forward_batch(np.stack(batch))
        preds = probs.argmax(axis=1)
        for true, pred in zip(labels, preds):
            counts[true, pred] += 1
        batch.clear()
        labels.clear()

    seen = 0
    for label, image in samples:
        batch.append(image)
        labels.append(int(label))
        seen += 1
        if len(batch) >= batch_size:
            flush()
    flush()
    if seen == 0:
        raise DatasetError("cannot evaluate an empty sample set")
    return ConfusionMatrix(counts=counts)


def evaluate_arrays(model: FerModel, xs: np.ndarray, ys: Sequence[int],
                    batch_size: int = 64) -> ConfusionMatrix:
    return evaluate(model, zip(ys, xs), batch_size=batch_size)
