"""Facial expression recognition and session orchestration for the Maya robot.

The pipeline runs landmarks -> normalization -> 96x96 raster -> the
two-inception-block network -> 7-way expression probabilities plus a 48-d
identity embedding. Around it: half-face permutation augmentation, an
event-sourced session layer for the live protocols, a statistics toolkit,
and an HTTP service with an operator CLI.
"""

__version__ = "0.1.0"

from .augment import (
    CompositeDataset,
    DatasetManifest,
    HalfBank,
    build_dataset,
    build_half_banks,
    generate_composites,
    stratified_split,
    synth_corpus,
)
from .fer import ConfusionMatrix, FerModel, Prediction, build_maya_net, evaluate, predict
from .gallery import IdentityGallery
from .landmarks import (
    EmotionLabel,
    LandmarkSet,
    RasterImage,
    normalize,
    parse_landmark_file,
    rasterize,
    split_halves,
)

__all__ = [
    "CompositeDataset",
    "ConfusionMatrix",
    "DatasetManifest",
    "EmotionLabel",
    "FerModel",
    "HalfBank",
    "IdentityGallery",
    "LandmarkSet",
    "Prediction",
    "RasterImage",
    "__version__",
    "build_dataset",
    "build_half_banks",
    "build_maya_net",
    "evaluate",
    "generate_composites",
    "normalize",
    "parse_landmark_file",
    "predict",
    "rasterize",
    "split_halves",
    "stratified_split",
    "synth_corpus",
]
