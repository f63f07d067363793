"""Exception types shared across the detection pipeline."""


class SeaHorizonError(Exception):
    """Base class for all library errors."""


class ImageTooSmallError(SeaHorizonError):
    """Downsampling produced a raster below the 8x8 minimum working size."""


class NoEdgesError(SeaHorizonError):
    """The edge map contains no usable edge pixels (no horizon candidate)."""


class FrameSourceError(SeaHorizonError):
    """A frame source is malformed (missing file, bad numbering, bad header)."""


class AnnotationError(SeaHorizonError):
    """Ground-truth annotation file is malformed or inconsistent."""
