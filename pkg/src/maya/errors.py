"""Exception hierarchy shared across the package.

Every domain error carries a stable machine-readable ``code`` so the HTTP
layer can surface it without string matching.
"""


class MayaError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


class LandmarkFormatError(MayaError):
    """Malformed landmark file input (bad JSON, wrong point count, ...)."""

    code = "landmark-format"


class DegenerateLandmarksError(MayaError):
    """Landmark set cannot be normalized (zero-extent feature box)."""

    code = "degenerate-landmarks"


class RasterBoundsError(MayaError):
    """A drawable landmark fell outside the raster canvas."""

    code = "raster-bounds"


class DatasetError(MayaError):
    """Invalid dataset construction request (empty bank, missing class, ...)."""

    code = "dataset"


class ShapeError(MayaError):
    """Tensor shape mismatch in the network engine."""

    code = "shape"


class SpecError(MayaError):
    """Illegal layer or architecture specification."""

    code = "layer-spec"


class TrainingDivergedError(MayaError):
    """Training aborted on a non-finite loss."""

    code = "training-diverged"


class CheckpointError(MayaError):
    """Corrupt or incompatible checkpoint data."""

    code = "checkpoint"


class GalleryError(MayaError):
    """Invalid identity-gallery operation (non-normalized embedding, ...)."""

    code = "gallery"


class ConfigError(MayaError):
    """Invalid session or board configuration."""

    code = "config"


class RangeError(MayaError):
    """A protocol value outside its documented range (pain score, answer)."""

    code = "range"


class PhaseError(MayaError):
    """Command issued in a session phase where it is not legal."""

    code = "phase"


class DuplicateRecordError(MayaError):
    """A second record for a key that admits at most one."""

    code = "duplicate-record"


class EventLogError(MayaError):
    """Event log integrity violation (seq gap, unknown kind)."""

    code = "event-log"


class StatsError(MayaError):
    """Invalid statistics input (length mismatch, undersized sample)."""

    code = "stats"


class DegenerateVarianceError(StatsError):
    """A t-test denominator is identically zero."""

    code = "degenerate-variance"


class DyadError(StatsError):
    """Incomplete child/parent dyads in a paired comparison."""

    code = "incomplete-dyads"


class CapacityError(MayaError):
    """Session capacity exceeded."""

    code = "capacity"
