"""Real-time sea-horizon detection from monocular maritime video.

Per frame: the red channel is downsampled, line segments are grown from
gradient orientations, filtered by slope, length and proximity to the
strongest candidates, rasterized into a downsampled edge map, reconstructed
at full resolution (bilinear upsample, vertical non-maximum suppression,
threshold), and the horizon is picked by a restricted Hough vote, gated
against the previous frame, and refined by least squares on inlier edge
pixels.
"""

from .config import DetectorConfig, config_with_overrides, load_config
from .edgemap import (
    EdgeCoords,
    EdgeMap,
    build_downsampled_map,
    rasterize_segment,
    rasterize_segments,
    reconstruct_full_map,
    upsample_bilinear,
)
from .errors import (
    AnnotationError,
    FrameSourceError,
    ImageTooSmallError,
    NoEdgesError,
    SeaHorizonError,
)
from .evaluate import (
    ErrorRecord,
    GtAnnotation,
    MetricSummary,
    compute_errors,
    load_annotations,
    read_results,
    summarize,
    write_results,
)
from .filters import (
    FilterTrace,
    LsfParams,
    RoifParams,
    assemble_candidates,
    length_partition,
    roif,
    slope_filter,
)
from .geometry import LineParams, SegmentSet, compute_lengths, compute_slopes
from .inference import (
    HorizonLine,
    OhmParams,
    TemporalState,
    hough_top_lines,
    ohm_select,
    refine_least_squares,
)
from .lsd import GrowingDetector, LsdParams, SegmentDetector, detect_segments
from .pipeline import FrameResult, process_frame, process_stream
from .preprocess import Frame, downsample, extract_red
from .sources import load_frames
from .synth import OccluderRect, SyntheticSceneParams, TrajectoryParams, generate_scene, generate_sequence

__version__ = "1.0.0"

__all__ = [
    "AnnotationError",
    "DetectorConfig",
    "EdgeCoords",
    "EdgeMap",
    "ErrorRecord",
    "FilterTrace",
    "Frame",
    "FrameResult",
    "FrameSourceError",
    "GrowingDetector",
    "GtAnnotation",
    "HorizonLine",
    "ImageTooSmallError",
    "LineParams",
    "LsdParams",
    "LsfParams",
    "MetricSummary",
    "NoEdgesError",
    "OccluderRect",
    "OhmParams",
    "RoifParams",
    "SeaHorizonError",
    "SegmentDetector",
    "SegmentSet",
    "SyntheticSceneParams",
    "TemporalState",
    "TrajectoryParams",
    "assemble_candidates",
    "build_downsampled_map",
    "compute_errors",
    "compute_lengths",
    "compute_slopes",
    "config_with_overrides",
    "detect_segments",
    "downsample",
    "extract_red",
    "generate_scene",
    "generate_sequence",
    "hough_top_lines",
    "length_partition",
    "load_annotations",
    "load_config",
    "load_frames",
    "ohm_select",
    "process_frame",
    "process_stream",
    "rasterize_segment",
    "rasterize_segments",
    "read_results",
    "reconstruct_full_map",
    "refine_least_squares",
    "roif",
    "slope_filter",
    "summarize",
    "upsample_bilinear",
    "write_results",
]
