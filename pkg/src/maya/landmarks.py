"""Parsing, normalization and rasterization of 68-point facial landmark sets.

Input landmarks are assumed to come from an upstream detector/aligner and are
already frontal-aligned; this module only canonicalizes scale and translation
and renders the landmark polylines onto a fixed 96x96 single-channel canvas.
The jaw contour (points 0..16) is carried through every transform but is never
drawn: the lower face outline contributes little to expression and excluding
it keeps the rendering compact.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import BinaryIO, Iterable, Optional, Union

import numpy as np

from .errors import DegenerateLandmarksError, LandmarkFormatError, RasterBoundsError

IMAGE_SIZE = 96
SEAM_ROW = 48
FEATURE_EXTENT = 80.0

# Points 0..16 outline the jaw; they are excluded from the feature bounding
# box and from rasterization.
JAW_POINTS = range(0, 17)
FEATURE_POINTS = range(17, 68)

# Drawable polyline groups over the canonical 68-point topology.
# (name, point indices, closed?)
POLYLINE_GROUPS = (
    ("brow_right", tuple(range(17, 22)), False),
    ("brow_left", tuple(range(22, 27)), False),
    ("nose", tuple(range(27, 36)), False),
    ("eye_right", tuple(range(36, 42)), True),
    ("eye_left", tuple(range(42, 48)), True),
    ("mouth_outer", tuple(range(48, 60)), True),
    ("mouth_inner", tuple(range(60, 68)), True),
)


class EmotionLabel(IntEnum):
    """The seven recognized expression classes, in canonical code order."""

    SADNESS = 0
    HAPPINESS = 1
    ANGER = 2
    STRESS = 3
    SURPRISE = 4
    DISGUST = 5
    NEUTRAL = 6

    @classmethod
    def from_name(cls, name: str) -> "EmotionLabel":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise LandmarkFormatError(f"unknown emotion label {name!r}") from None

    @property
    def display_name(self) -> str:
        return self.name.lower()


LABEL_NAMES = tuple(label.display_name for label in EmotionLabel)
NON_NEUTRAL_LABELS = tuple(label for label in EmotionLabel if label is not EmotionLabel.NEUTRAL)


@dataclass(frozen=True)
class LandmarkSet:
    """One face as 68 (x, y) key points in source pixel units."""

    points: np.ndarray  # (68, 2) float64
    subject_id: str
    label: Optional[EmotionLabel] = None
    source_frame: Optional[str] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (68, 2):
            raise LandmarkFormatError(
                f"expected 68 points, got shape {pts.shape}", subject=self.subject_id
            )
        object.__setattr__(self, "points", pts)

    def validate(self) -> "LandmarkSet":
        """Check the value invariants, returning self for chaining."""
        if not np.all(np.isfinite(self.points)):
            raise LandmarkFormatError("non-finite coordinate", subject=self.subject_id)
        w, h = feature_extent(self.points)
        if w <= 0.0 or h <= 0.0:
            raise DegenerateLandmarksError(
                "feature bounding box (points 17..67) must have positive extent",
                subject=self.subject_id,
            )
        return self


@dataclass(frozen=True)
class RasterImage:
    """96x96 single-channel rendering of a normalized landmark set."""

    pixels: np.ndarray  # (96, 96) float64 in [0, 1]
    seam_row: int = SEAM_ROW

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.shape != (IMAGE_SIZE, IMAGE_SIZE):
            raise LandmarkFormatError(f"raster must be {IMAGE_SIZE}x{IMAGE_SIZE}, got {px.shape}")
        object.__setattr__(self, "pixels", px)


def feature_extent(points: np.ndarray) -> tuple[float, float]:
    """Width and height of the bounding box over the non-jaw points."""
    feats = points[FEATURE_POINTS.start :]
    mins = feats.min(axis=0)
    maxs = feats.max(axis=0)
    return float(maxs[0] - mins[0]), float(maxs[1] - mins[1])


def parse_landmark_file(source: Union[bytes, str, BinaryIO]) -> list[LandmarkSet]:
    """Parse the JSON Lines landmark format into LandmarkSets, in file order.

    Each line is an object with fields ``subject`` (string), ``label``
    (string or null) and ``points`` (array of 68 [x, y] pairs). Errors name
    the offending 1-based line number.
    """
    if isinstance(source, bytes):
        stream = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = io.StringIO(source)
    else:
        stream = io.TextIOWrapper(source, encoding="utf-8")

    sets: list[LandmarkSet] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LandmarkFormatError(f"line {lineno}: malformed JSON ({exc.msg})", line=lineno)
        try:
            sets.append(_landmark_from_obj(obj, lineno))
        except LandmarkFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise LandmarkFormatError(f"line {lineno}: {exc}", line=lineno)
    return sets


def _landmark_from_obj(obj: dict, lineno: int) -> LandmarkSet:
    if not isinstance(obj, dict):
        raise LandmarkFormatError(f"line {lineno}: expected an object", line=lineno)
    points = obj.get("points")
    if not isinstance(points, list) or len(points) != 68:
        count = len(points) if isinstance(points, list) else "no"
        raise LandmarkFormatError(f"line {lineno}: expected 68 points, got {count}", line=lineno)
    arr = np.empty((68, 2), dtype=np.float64)
    for i, pair in enumerate(points):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise LandmarkFormatError(f"line {lineno}: point {i} is not an [x, y] pair", line=lineno)
        x, y = float(pair[0]), float(pair[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise LandmarkFormatError(f"line {lineno}: point {i} has a non-finite coordinate", line=lineno)
        arr[i] = (x, y)
    raw_label = obj.get("label")
    label = None
    if raw_label is not None:
        try:
            label = EmotionLabel.from_name(str(raw_label))
        except LandmarkFormatError:
            raise LandmarkFormatError(f"line {lineno}: unknown label {raw_label!r}", line=lineno)
    ls = LandmarkSet(
        points=arr,
        subject_id=str(obj.get("subject", "")),
        label=label,
        source_frame=obj.get("frame"),
    )
    return ls.validate()


def landmark_to_obj(ls: LandmarkSet) -> dict:
    """Inverse of the parser's per-line mapping; used by writers."""
    return {
        "subject": ls.subject_id,
        "label": None if ls.label is None else ls.label.display_name,
        "points": [[float(x), float(y)] for x, y in ls.points],
        **({"frame": ls.source_frame} if ls.source_frame is not None else {}),
    }


def write_landmark_file(sets: Iterable[LandmarkSet], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ls in sets:
            fh.write(json.dumps(landmark_to_obj(ls), sort_keys=True) + "\n")


def normalize(ls: LandmarkSet) -> LandmarkSet:
    """Canonicalize scale and translation.

    Uniform scale and translation such that the feature box (points 17..67)
    has its larger dimension equal to 80 px, is horizontally centered in
    [0, 96), and point #30's y lands exactly on the seam row (48.0). The jaw
    points receive the identical transform; they remain excluded from
    rasterization.
    """
    ls.validate()
    feats = ls.points[FEATURE_POINTS.start :]
    mins = feats.min(axis=0)
    maxs = feats.max(axis=0)
    width = maxs[0] - mins[0]
    height = maxs[1] - mins[1]
    extent = max(width, height)
    if extent <= 0.0:
        raise DegenerateLandmarksError("zero-extent feature bounding box", subject=ls.subject_id)
    scale = FEATURE_EXTENT / extent
    center_x = (mins[0] + maxs[0]) / 2.0
    anchor_y = ls.points[30, 1]
    out = np.empty_like(ls.points)
    out[:, 0] = (ls.points[:, 0] - center_x) * scale + IMAGE_SIZE / 2.0
    out[:, 1] = (ls.points[:, 1] - anchor_y) * scale + float(SEAM_ROW)
    return replace(ls, points=out)


def _bresenham(r0: int, c0: int, r1: int, c1: int) -> list[tuple[int, int]]:
    """Integer line from (r0, c0) to (r1, c1), endpoints included."""
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    cells = []
    r, c = r0, c0
    while True:
        cells.append((r, c))
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
    return cells


_BINOMIAL_1D = np.array([1.0, 2.0, 1.0]) / 4.0


def _smooth(img: np.ndarray) -> np.ndarray:
    """One 3x3 binomial pass (separable [1,2,1]/4, zero padding)."""
    padded = np.pad(img, 1)
    rows = (
        padded[:-2, 1:-1] * _BINOMIAL_1D[0]
        + padded[1:-1, 1:-1] * _BINOMIAL_1D[1]
        + padded[2:, 1:-1] * _BINOMIAL_1D[2]
    )
    padded = np.pad(rows, ((0, 0), (1, 1)))
    return (
        padded[:, :-2] * _BINOMIAL_1D[0]
        + padded[:, 1:-1] * _BINOMIAL_1D[1]
        + padded[:, 2:] * _BINOMIAL_1D[2]
    )


def rasterize(ls: LandmarkSet) -> RasterImage:
    """Render a normalized landmark set to a 96x96 image.

    Draws 1-px polylines at value 1.0 for brows, nose, eyes and both lip
    contours (jaw never drawn), applies a single 3x3 binomial smoothing pass
    and clamps to [0, 1]. Deterministic: equal inputs give bit-identical
    rasters.
    """
    pts = ls.points
    canvas = np.zeros((IMAGE_SIZE, IMAGE_SIZE), dtype=np.float64)
    for _, indices, closed in POLYLINE_GROUPS:
        for idx in indices:
            x, y = pts[idx]
            if not (0.0 <= x < IMAGE_SIZE and 0.0 <= y < IMAGE_SIZE):
                raise RasterBoundsError(
                    f"point {idx} at ({x:.2f}, {y:.2f}) outside [0, {IMAGE_SIZE})",
                    point=idx,
                    subject=ls.subject_id,
                )
        cells = [(int(pts[i, 1]), int(pts[i, 0])) for i in indices]
        segments = list(zip(cells, cells[1:]))
        if closed:
            segments.append((cells[-1], cells[0]))
        for (r0, c0), (r1, c1) in segments:
            for r, c in _bresenham(r0, c0, r1, c1):
                canvas[r, c] = 1.0
    smoothed = np.clip(_smooth(canvas), 0.0, 1.0)
    return RasterImage(pixels=smoothed)


def split_halves(img: RasterImage) -> tuple[np.ndarray, np.ndarray]:
    """Split at the seam row into upper (rows 0..47) and lower (rows 48..95)."""
    if img.seam_row != SEAM_ROW:
        raise LandmarkFormatError(f"seam row must be {SEAM_ROW}, got {img.seam_row}")
    return img.pixels[:SEAM_ROW].copy(), img.pixels[SEAM_ROW:].copy()
