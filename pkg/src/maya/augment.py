"""Half-face permutation augmentation, dataset assembly and splitting.

Within one emotion class, every upper face half is paired with every lower
half, expanding n source images to n*n composites. Two split policies are
provided: ``paper`` shuffles composites freely (composites sharing a source
half can straddle train and test), while ``source-disjoint`` partitions the
source images first and keeps only composites whose two halves come from the
same partition, which prevents leakage at the cost of dropping mixed pairs.

A deterministic synthetic landmark corpus stands in for the curated CK+/MMI
stills, which cannot be redistributed.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import DatasetError
from .landmarks import (
    IMAGE_SIZE,
    EmotionLabel,
    LandmarkSet,
    RasterImage,
    normalize,
    rasterize,
    split_halves,
)

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_FRACTIONS = (0.70, 0.10, 0.20)
PACKED_MAGIC = b"MAYD"
PACKED_VERSION = 1
_PIXELS_PER_SAMPLE = IMAGE_SIZE * IMAGE_SIZE


@dataclass
class HalfBank:
    """Upper and lower half images of one emotion class, by source."""

    label: EmotionLabel
    uppers: list[tuple[str, np.ndarray]]
    lowers: list[tuple[str, np.ndarray]]

    def __post_init__(self):
        if len(self.uppers) != len(self.lowers):
            raise DatasetError("uppers and lowers must have equal length", label=self.label)
        for entries in (self.uppers, self.lowers):
            ids = [sid for sid, _ in entries]
            if len(set(ids)) != len(ids):
                raise DatasetError("duplicate source_id in half bank", label=self.label)

    def __len__(self) -> int:
        return len(self.uppers)


@dataclass(frozen=True)
class CompositeSample:
    """One augmented image: upper half of one source over lower half of another."""

    label: EmotionLabel
    upper_src: str
    lower_src: str
    image: RasterImage


def build_half_banks(sets: Iterable[LandmarkSet]) -> dict[EmotionLabel, HalfBank]:
    """Normalize, rasterize and split every labeled landmark set into banks."""
    grouped: dict[EmotionLabel, HalfBank] = {}
    for ls in sets:
        if ls.label is None:
            raise DatasetError(f"landmark set {ls.subject_id!r} has no label")
        raster = rasterize(normalize(ls))
        upper, lower = split_halves(raster)
        bank = grouped.get(ls.label)
        if bank is None:
            bank = HalfBank(label=ls.label, uppers=[], lowers=[])
            grouped[ls.label] = bank
        bank.uppers.append((ls.subject_id, upper))
        bank.lowers.append((ls.subject_id, lower))
    for bank in grouped.values():
        HalfBank(bank.label, bank.uppers, bank.lowers)  # re-check invariants
    return grouped


def compose(upper: np.ndarray, lower: np.ndarray) -> RasterImage:
    return RasterImage(pixels=np.vstack([upper, lower]))


def generate_composites(bank: HalfBank) -> list[CompositeSample]:
    """All n*n upper/lower pairings, ordered by (upper index, lower index)."""
    if len(bank) == 0:
        raise DatasetError("empty half bank", label=bank.label)
    samples = []
    for upper_src, upper in bank.uppers:
        for lower_src, lower in bank.lowers:
            samples.append(
                CompositeSample(
                    label=bank.label,
                    upper_src=upper_src,
                    lower_src=lower_src,
                    image=compose(upper, lower),
                )
            )
    return samples


class CompositeDataset:
    """Lazy view over all composites of seven half banks.

    Composites are indexed globally: classes in label-code order, and within
    a class lexicographically by (upper index, lower index). Images are
    materialized on demand so the 80k-composite configuration stays cheap.
    """

    def __init__(self, banks: dict[EmotionLabel, HalfBank]):
        missing = [label.display_name for label in EmotionLabel if label not in banks]
        if missing:
            raise DatasetError(f"missing class(es): {', '.join(missing)}")
        for label, bank in banks.items():
            if len(bank) == 0:
                raise DatasetError("empty half bank", label=label)
        self.banks = [banks[label] for label in EmotionLabel]
        self.class_sizes = [len(b) ** 2 for b in self.banks]
        self.offsets = np.concatenate([[0], np.cumsum(self.class_sizes)])

    def __len__(self) -> int:
        return int(self.offsets[-1])

    def locate(self, index: int) -> tuple[EmotionLabel, int, int]:
        """Map a global index to (label, upper index, lower index)."""
        if not 0 <= index < len(self):
            raise IndexError(index)
        cls = int(np.searchsorted(self.offsets, index, side="right") - 1)
        local = index - int(self.offsets[cls])
        n = len(self.banks[cls])
        return EmotionLabel(cls), local // n, local % n

    def sources_of(self, index: int) -> tuple[str, str]:
        label, ui, li = self.locate(index)
        bank = self.banks[label]
        return bank.uppers[ui][0], bank.lowers[li][0]

    def image(self, index: int) -> np.ndarray:
        label, ui, li = self.locate(index)
        bank = self.banks[label]
        return np.vstack([bank.uppers[ui][1], bank.lowers[li][1]])

    def label_of(self, index: int) -> EmotionLabel:
        return self.locate(index)[0]

    def materialize(self, indices: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Stack images and labels for the given global indices."""
        xs = np.empty((len(indices), IMAGE_SIZE, IMAGE_SIZE), dtype=np.float64)
        ys = np.empty(len(indices), dtype=np.int64)
        for row, idx in enumerate(indices):
            xs[row] = self.image(int(idx))
            ys[row] = int(self.label_of(int(idx)))
        return xs, ys

    def iter_samples(self, indices: Optional[Sequence[int]] = None) -> Iterator[tuple[int, np.ndarray]]:
        rng = range(len(self)) if indices is None else indices
        for idx in rng:
            yield int(self.label_of(int(idx))), self.image(int(idx))


def build_dataset(banks: dict[EmotionLabel, HalfBank]) -> CompositeDataset:
    """Assemble the full n_c^2-per-class composite dataset over 7 banks."""
    return CompositeDataset(banks)


@dataclass
class DatasetManifest:
    """Split assignment and bookkeeping for one dataset build."""

    seed: int
    leakage_mode: str
    per_class_counts: dict[str, int]
    splits: dict[str, list[int]]
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS

    @property
    def total(self) -> int:
        return sum(self.per_class_counts.values())

    def split_sizes(self) -> tuple[int, int, int]:
        return tuple(len(self.splits[name]) for name in SPLIT_NAMES)

    def to_json(self) -> str:
        doc = {
            "v": 1,
            "seed": self.seed,
            "leakage_mode": self.leakage_mode,
            "fractions": list(self.fractions),
            "per_class_counts": self.per_class_counts,
            "splits": {name: self.splits[name] for name in SPLIT_NAMES},
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        return cls(
            seed=doc["seed"],
            leakage_mode=doc["leakage_mode"],
            per_class_counts=doc["per_class_counts"],
            splits={name: list(doc["splits"][name]) for name in SPLIT_NAMES},
            fractions=tuple(doc.get("fractions", DEFAULT_FRACTIONS)),
        )


def largest_remainder_sizes(
    total: int, fractions: Sequence[float] = DEFAULT_FRACTIONS
) -> tuple[int, ...]:
    """Integer sizes summing to total; leftovers go to the largest remainders.

    Ties (and equal remainders) are resolved in favor of later entries, so
    with (train, val, test) fractions the test size is rounded up first.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DatasetError(f"fractions must sum to 1, got {sum(fractions)}")
    exact = [total * f for f in fractions]
    floors = [int(math.floor(e + 1e-9)) for e in exact]
    leftover = total - sum(floors)
    if leftover < 0:
        raise DatasetError("fraction rounding exceeded total")
    order = sorted(range(len(fractions)), key=lambda i: (-(exact[i] - floors[i]), -i))
    for i in order[:leftover]:
        floors[i] += 1
    return tuple(floors)


def stratified_split(
    dataset: CompositeDataset,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    seed: int = 0,
    leakage_mode: str = "paper",
) -> DatasetManifest:
    """Assign every composite to train/val/test.

    ``paper`` mode shuffles all composites and slices them so the three split
    sizes follow largest-remainder rounding of the grand total (test rounded
    first). ``source-disjoint`` mode partitions each class's sources with the
    same rounding rule and keeps only composites whose halves share a
    partition; mixed-source composites belong to no split.
    """
    if leakage_mode not in ("paper", "source-disjoint"):
        raise DatasetError(f"unknown leakage mode {leakage_mode!r}")
    for label, size in zip(EmotionLabel, dataset.class_sizes):
        if size == 0:
            raise DatasetError("class with zero samples", label=label)

    rng = np.random.default_rng(seed)
    splits: dict[str, list[int]] = {name: [] for name in SPLIT_NAMES}

    if leakage_mode == "paper":
        sizes = largest_remainder_sizes(len(dataset), fractions)
        perm = rng.permutation(len(dataset))
        bounds = np.cumsum([0, *sizes])
        for name, lo, hi in zip(SPLIT_NAMES, bounds[:-1], bounds[1:]):
            splits[name] = sorted(int(i) for i in perm[lo:hi])
    else:
        for cls, bank in enumerate(dataset.banks):
            n = len(bank)
            source_sizes = largest_remainder_sizes(n, fractions)
            perm = rng.permutation(n)
            assignment = np.empty(n, dtype=np.int64)
            bounds = np.cumsum([0, *source_sizes])
            for split_idx, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
                assignment[perm[lo:hi]] = split_idx
            offset = int(dataset.offsets[cls])
            for ui in range(n):
                for li in range(n):
                    if assignment[ui] == assignment[li]:
                        splits[SPLIT_NAMES[assignment[ui]]].append(offset + ui * n + li)
        for name in SPLIT_NAMES:
            splits[name].sort()

    per_class = {
        label.display_name: size for label, size in zip(EmotionLabel, dataset.class_sizes)
    }
    return DatasetManifest(
        seed=seed,
        leakage_mode=leakage_mode,
        per_class_counts=per_class,
        splits=splits,
        fractions=tuple(fractions),
    )


def write_packed(samples: Iterable[tuple[int, np.ndarray]], path) -> int:
    """Stream composites to the packed binary format; returns sample count."""
    count = 0
    with open(path, "wb") as fh:
        fh.write(PACKED_MAGIC)
        fh.write(struct.pack("<II", PACKED_VERSION, 0))
        for label, pixels in samples:
            fh.write(struct.pack("<B", int(label)))
            fh.write(np.ascontiguousarray(pixels, dtype="<f4").tobytes())
            count += 1
        fh.seek(len(PACKED_MAGIC) + 4)
        fh.write(struct.pack("<I", count))
    return count


def read_packed(path) -> tuple[np.ndarray, np.ndarray]:
    """Load a packed composite file into (labels, pixels) arrays."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != PACKED_MAGIC:
            raise DatasetError(f"bad magic {magic!r}")
        version, count = struct.unpack("<II", fh.read(8))
        if version != PACKED_VERSION:
            raise DatasetError(f"unsupported packed version {version}")
        labels = np.empty(count, dtype=np.uint8)
        pixels = np.empty((count, IMAGE_SIZE, IMAGE_SIZE), dtype=np.float32)
        sample_bytes = _PIXELS_PER_SAMPLE * 4
        for i in range(count):
            head = fh.read(1)
            body = fh.read(sample_bytes)
            if len(head) != 1 or len(body) != sample_bytes:
                raise DatasetError(f"truncated packed file at sample {i}")
            labels[i] = head[0]
            pixels[i] = np.frombuffer(body, dtype="<f4").reshape(IMAGE_SIZE, IMAGE_SIZE)
    return labels, pixels


# ---------------------------------------------------------------------------
# Synthetic landmark corpus
# ---------------------------------------------------------------------------

def _base_face() -> np.ndarray:
    """Neutral 68-point template in a ~200x200 source coordinate space."""
    pts = np.zeros((68, 2), dtype=np.float64)
    # Jaw arc, ear to ear through the chin.
    for i, t in enumerate(np.linspace(-1.0, 1.0, 17)):
        pts[i, 0] = 100.0 + 62.0 * t
        pts[i, 1] = 100.0 + 88.0 * math.sqrt(max(0.0, 1.0 - t * t))
    # Brows.
    arch = (0.0, 3.0, 4.0, 3.0, 0.0)
    for i, x in enumerate(np.linspace(55.0, 90.0, 5)):
        pts[17 + i] = (x, 78.0 - arch[i])
    for i, x in enumerate(np.linspace(110.0, 145.0, 5)):
        pts[22 + i] = (x, 78.0 - arch[4 - i])
    # Nose bridge and nostril line.
    for i, y in enumerate((88.0, 98.0, 108.0, 118.0)):
        pts[27 + i] = (100.0, y)
    nostril_y = (125.0, 127.0, 128.0, 127.0, 125.0)
    for i, x in enumerate(np.linspace(88.0, 112.0, 5)):
        pts[31 + i] = (x, nostril_y[i])
    # Eyes (six-point loops).
    pts[36:42] = [(60, 95), (68, 91), (76, 91), (84, 95), (76, 99), (68, 99)]
    pts[42:48] = [(116, 95), (124, 91), (132, 91), (140, 95), (132, 99), (124, 99)]
    # Outer lip contour.
    pts[48:60] = [
        (78, 150), (85, 145), (93, 142), (100, 143), (107, 142), (115, 145),
        (122, 150), (115, 156), (107, 159), (100, 160), (93, 159), (85, 156),
    ]
    # Inner lip contour.
    pts[60:68] = [
        (83, 150), (93, 147), (100, 148), (107, 147),
        (117, 150), (107, 152), (100, 153), (93, 152),
    ]
    return pts


def _shift(pts: np.ndarray, indices, dx: float = 0.0, dy: float = 0.0) -> None:
    idx = list(indices)
    pts[idx, 0] += dx
    pts[idx, 1] += dy


def expression_template(label: EmotionLabel) -> np.ndarray:
    """Hand-authored per-class deformation of the neutral template."""
    pts = _base_face()
    if label is EmotionLabel.NEUTRAL:
        return pts
    if label is EmotionLabel.HAPPINESS:
        _shift(pts, [48], dx=-5.0, dy=-7.0)
        _shift(pts, [54], dx=5.0, dy=-7.0)
        _shift(pts, [49, 53], dy=-4.0)
        _shift(pts, [60], dx=-3.0, dy=-3.0)
        _shift(pts, [64], dx=3.0, dy=-3.0)
        _shift(pts, [56, 57, 58], dy=2.0)
        _shift(pts, [37, 38, 43, 44], dy=2.0)
        _shift(pts, [40, 41, 46, 47], dy=-1.0)
    elif label is EmotionLabel.SADNESS:
        _shift(pts, [48], dy=7.0)
        _shift(pts, [54], dy=7.0)
        _shift(pts, [49, 53], dy=3.0)
        _shift(pts, [60, 64], dy=4.0)
        _shift(pts, [21, 22], dy=-7.0)
        _shift(pts, [20, 23], dy=-4.0)
        _shift(pts, [37, 38, 43, 44], dy=1.5)
    elif label is EmotionLabel.ANGER:
        _shift(pts, [21], dx=3.0, dy=6.0)
        _shift(pts, [22], dx=-3.0, dy=6.0)
        _shift(pts, [20, 23], dy=4.0)
        _shift(pts, [37, 38, 43, 44], dy=2.5)
        _shift(pts, [40, 41, 46, 47], dy=-2.0)
        _shift(pts, [48], dx=4.0)
        _shift(pts, [54], dx=-4.0)
        _shift(pts, [55, 56, 57, 58, 59], dy=-4.0)
        pts[60:68, 1] = 150.0
    elif label is EmotionLabel.STRESS:
        _shift(pts, range(17, 27), dy=-5.0)
        _shift(pts, [37, 38, 43, 44], dy=-2.0)
        _shift(pts, [48], dx=-3.0, dy=4.0)
        _shift(pts, [54], dx=3.0, dy=4.0)
        _shift(pts, [61, 62, 63], dy=-2.0)
        _shift(pts, [65, 66, 67], dy=3.0)
        _shift(pts, [55, 56, 57, 58, 59], dy=3.0)
    elif label is EmotionLabel.SURPRISE:
        _shift(pts, range(17, 27), dy=-10.0)
        _shift(pts, [19, 24], dy=-2.0)
        _shift(pts, [37, 38, 43, 44], dy=-4.0)
        _shift(pts, [40, 41, 46, 47], dy=4.0)
        _shift(pts, [48], dx=4.0)
        _shift(pts, [54], dx=-4.0)
        _shift(pts, [49, 50, 51, 52, 53], dy=-4.0)
        _shift(pts, [55, 56, 57, 58, 59], dy=10.0)
        _shift(pts, [60], dx=3.0)
        _shift(pts, [64], dx=-3.0)
        _shift(pts, [61, 62, 63], dy=-3.0)
        _shift(pts, [65, 66, 67], dy=9.0)
    elif label is EmotionLabel.DISGUST:
        _shift(pts, range(17, 27), dy=3.0)
        _shift(pts, [21, 22], dy=2.0)
        _shift(pts, [27, 28, 29], dy=2.0)
        _shift(pts, range(31, 36), dy=-4.0)
        _shift(pts, [37, 38, 43, 44], dy=2.0)
        _shift(pts, [49, 50, 51, 52, 53], dy=-5.0)
        _shift(pts, [61, 62, 63], dy=-3.0)
        _shift(pts, [48, 54], dy=2.0)
    return pts


def synth_corpus(
    per_class: int,
    seed: int = 0,
    jitter: float = 2.0,
    classes: Sequence[EmotionLabel] = tuple(EmotionLabel),
) -> list[LandmarkSet]:
    """Deterministic synthetic landmark sets: templates plus bounded jitter."""
    if per_class < 1:
        raise DatasetError(f"per_class must be >= 1, got {per_class}")
    rng = np.random.default_rng(seed)
    sets = []
    for label in classes:
        label = EmotionLabel(label)
        template = expression_template(label)
        for k in range(per_class):
            noise = rng.uniform(-jitter, jitter, size=(68, 2)) if jitter > 0 else 0.0
            sets.append(
                LandmarkSet(
                    points=template + noise,
                    subject_id=f"synth-{label.display_name}-{k:03d}",
                    label=label,
                ).validate()
            )
    return sets
