"""Per-frame orchestration of the full detection chain, with stage timings.

Stage order: red channel + downsample -> segment detection -> slope/length
filtering -> region-of-interest filtering -> edge-map rasterization and
full-resolution reconstruction -> Hough voting, temporal gating and
least-squares refinement.

Frames that yield no usable edges (or are too small to downsample) are soft
failures: the frame is flagged, no line is reported, and the temporal state
is passed through untouched so the stream keeps its memory.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .config import DetectorConfig
from .edgemap import EdgeMap, build_downsampled_map, rasterize_segments, reconstruct_full_map
from .errors import ImageTooSmallError, NoEdgesError
from .filters import FilterTrace, length_partition, roif, slope_filter
from .geometry import SegmentSet
from .inference import HorizonLine, TemporalState, hough_top_lines, ohm_select, refine_least_squares
from .lsd import GrowingDetector, SegmentDetector
from .preprocess import Frame, downsample, extract_red

import numpy as np

TIMING_KEYS = ("detect", "lsf", "roif", "step_edge", "inference", "total")


@dataclass
class FrameResult:
    """Outcome of one frame: the line (None on failure), flags, timings."""

    frame_index: int
    line: HorizonLine | None
    outlier: bool
    failure: bool
    timings_ms: dict[str, float] = field(default_factory=dict)
    trace: FilterTrace | None = None
    edge_map: EdgeMap | None = None


def _merge(confident: SegmentSet, kept: SegmentSet) -> SegmentSet:
    return SegmentSet(
        xs=np.concatenate([confident.xs, kept.xs]),
        ys=np.concatenate([confident.ys, kept.ys]),
        xe=np.concatenate([confident.xe, kept.xe]),
        ye=np.concatenate([confident.ye, kept.ye]),
        slope=np.concatenate([confident.ensure_slopes(), kept.ensure_slopes()]),
        length=np.concatenate([confident.ensure_lengths(), kept.ensure_lengths()]),
    )


def process_frame(
    frame: Frame,
    config: DetectorConfig,
    state: TemporalState,
    detector: SegmentDetector | None = None,
) -> tuple[FrameResult, TemporalState]:
    """Run the full chain on one frame.

    Returns the frame's result and the successor temporal state. The input
    state is never mutated; on soft failure it is returned as-is.
    """
    if detector is None:
        detector = GrowingDetector(config.lsd)
    timings: dict[str, float] = {}
    t_start = time.perf_counter()

    def fail() -> tuple[FrameResult, TemporalState]:
        timings["total"] = (time.perf_counter() - t_start) * 1000.0
        result = FrameResult(
            frame_index=frame.frame_index,
            line=None,
            outlier=False,
            failure=True,
            timings_ms=timings,
        )
        return result, state

    t0 = time.perf_counter()
    try:
        red = extract_red(frame.pixels)
        small = downsample(red, config.kappa)
        segs = detector.detect(small)
    except ImageTooSmallError:
        return fail()
    timings["detect"] = (time.perf_counter() - t0) * 1000.0

    trace = FilterTrace(n_raw=len(segs))
    t0 = time.perf_counter()
    flat = slope_filter(segs, config.lsf)
    confident, doubtful = length_partition(flat, config.lsf)
    trace.n_slope_kept = len(flat)
    trace.n_confident = len(confident)
    trace.n_doubtful = len(doubtful)
    timings["lsf"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    kept, mask = roif(confident, doubtful, config.roif)
    trace.n_doubtful_kept = len(kept)
    trace.doubtful_keep_mask = mask
    survivors = _merge(confident, kept)
    timings["roif"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    coords = rasterize_segments(survivors, small.shape[1], small.shape[0])
    eprime = build_downsampled_map(coords, small.shape[1], small.shape[0])
    emap = reconstruct_full_map(
        eprime, config.kappa, (frame.height, frame.width), config.edge_threshold
    )
    timings["step_edge"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    ohm = config.ohm.resolved(frame.height)
    try:
        top = hough_top_lines(emap, ohm.m_top, config.lsf.slope_threshold)
    except NoEdgesError:
        return fail()
    coarse, new_state = ohm_select(top, state, ohm)
    refined = refine_least_squares(coarse, emap, ohm.d_in)
    timings["inference"] = (time.perf_counter() - t0) * 1000.0
    timings["total"] = (time.perf_counter() - t_start) * 1000.0

    emitted = HorizonLine(min(max(refined.y, 0.0), frame.height - 1.0), refined.phi)
    outlier = new_state.n_outs > state.n_outs or new_state.in_failure
    result = FrameResult(
        frame_index=frame.frame_index,
        line=emitted,
        outlier=outlier,
        failure=new_state.in_failure,
        timings_ms=timings,
        trace=trace if config.debug_dump else None,
        edge_map=emap if config.debug_dump else None,
    )
    return result, new_state


def process_stream(
    frames: Iterable[Frame],
    config: DetectorConfig,
    state: TemporalState | None = None,
    detector: SegmentDetector | None = None,
) -> Iterator[FrameResult]:
    """Sequential per-stream loop; owns and threads the temporal state."""
    if state is None:
        state = TemporalState()
    if detector is None:
        detector = GrowingDetector(config.lsd)
    for frame in frames:
        result, state = process_frame(frame, config, state, detector)
        yield result
