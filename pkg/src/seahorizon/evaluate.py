"""Ground-truth ingestion, error metrics, and result persistence.

Annotations use the central-column convention: Y is the line's height (px)
at x = (width-1)/2. A converter is provided for files annotated at the left
image edge instead.

Metric conventions: sigma is the population standard deviation and
quantiles use linear interpolation between closest ranks, so numbers match
across implementations.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AnnotationError
from .inference import HorizonLine
from .pipeline import FrameResult

ANNOTATION_HEADER = ["frame_index", "y_gt_px", "phi_gt_deg"]


@dataclass(frozen=True)
class GtAnnotation:
    frame_index: int
    y_gt: float
    phi_gt: float

    def __post_init__(self):
        if not (math.isfinite(self.y_gt) and math.isfinite(self.phi_gt)):
            raise AnnotationError(f"frame {self.frame_index}: annotation values must be finite")


@dataclass(frozen=True)
class ErrorRecord:
    frame_index: int
    y_err: float
    phi_err: float


@dataclass(frozen=True)
class MetricStats:
    mu: float
    sigma: float
    q25: float
    q50: float
    q75: float
    q95: float


@dataclass(frozen=True)
class MetricSummary:
    y_err: MetricStats
    phi_err: MetricStats
    mean_time_ms: float


def left_edge_to_center(y_left: float, phi_deg: float, width: int) -> float:
    """Convert a left-edge Y annotation to the central-column convention."""
    slope = -math.tan(math.radians(phi_deg))
    return y_left + slope * (width - 1) / 2.0


def load_annotations(path, left_edge_width: int | None = None) -> dict[int, GtAnnotation]:
    """Read an annotation CSV into a frame_index -> GtAnnotation map.

    With left_edge_width set, Y values are treated as left-edge heights and
    converted to the central column of an image that wide.
    """
    out: dict[int, GtAnnotation] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise AnnotationError(f"{path}: empty annotation file") from None
        if [c.strip() for c in header] != ANNOTATION_HEADER:
            raise AnnotationError(
                f"{path}: bad header {header!r}, expected {','.join(ANNOTATION_HEADER)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise AnnotationError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                index = int(row[0])
                y_gt = float(row[1])
                phi_gt = float(row[2])
            except ValueError as exc:
                raise AnnotationError(f"{path}:{lineno}: {exc}") from exc
            if index in out:
                raise AnnotationError(f"{path}:{lineno}: duplicate frame_index {index}")
            if left_edge_width is not None:
                y_gt = left_edge_to_center(y_gt, phi_gt, left_edge_width)
            out[index] = GtAnnotation(index, y_gt, phi_gt)
    return out


def write_annotations(path, annotations: Iterable[GtAnnotation]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ANNOTATION_HEADER)
        for ann in annotations:
            writer.writerow([ann.frame_index, repr(ann.y_gt), repr(ann.phi_gt)])


def compute_errors(
    results: Iterable[FrameResult], annotations: Mapping[int, GtAnnotation]
) -> list[ErrorRecord]:
    """Per-frame absolute errors for every result that carries a line.

    A detected frame without an annotation is an error (listing all such
    indices); failed frames are skipped.
    """
    records: list[ErrorRecord] = []
    unmatched: list[int] = []
    for result in results:
        if result.line is None:
            continue
        ann = annotations.get(result.frame_index)
        if ann is None:
            unmatched.append(result.frame_index)
            continue
        records.append(
            ErrorRecord(
                frame_index=result.frame_index,
                y_err=abs(result.line.y - ann.y_gt),
                phi_err=abs(result.line.phi - ann.phi_gt),
            )
        )
    if unmatched:
        raise AnnotationError(f"no annotation for frame indices: {unmatched}")
    return records


def _stats(values: np.ndarray) -> MetricStats:
    q25, q50, q75, q95 = np.percentile(values, [25.0, 50.0, 75.0, 95.0])
    return MetricStats(
        mu=float(values.mean()),
        sigma=float(values.std()),
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        q95=float(q95),
    )


def summarize(errors: list[ErrorRecord], times_ms: Iterable[float]) -> MetricSummary:
    """Six statistics per error kind plus the mean per-frame time."""
    if not errors:
        raise ValueError("cannot summarize an empty error list")
    y = np.array([e.y_err for e in errors], dtype=np.float64)
    phi = np.array([e.phi_err for e in errors], dtype=np.float64)
    times = list(times_ms)
    mean_time = float(np.mean(times)) if times else 0.0
    return MetricSummary(y_err=_stats(y), phi_err=_stats(phi), mean_time_ms=mean_time)


def write_results(path, results: Iterable[FrameResult], video_id: str, config_echo: Mapping) -> None:
    """Persist per-frame results as one JSON document."""
    frames = []
    for r in results:
        frames.append(
            {
                "frame_index": r.frame_index,
                "y": None if r.line is None else r.line.y,
                "phi": None if r.line is None else r.line.phi,
                "outlier": r.outlier,
                "failure": r.failure,
                "timings_ms": dict(r.timings_ms),
            }
        )
    doc = {"video_id": video_id, "config_echo": dict(config_echo), "frames": frames}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_results(path) -> tuple[str, dict, list[FrameResult]]:
    """Load a results document back into FrameResult objects."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    results = []
    for entry in doc["frames"]:
        line = None
        if entry["y"] is not None:
            line = HorizonLine(float(entry["y"]), float(entry["phi"]))
        results.append(
            FrameResult(
                frame_index=int(entry["frame_index"]),
                line=line,
                outlier=bool(entry["outlier"]),
                failure=bool(entry["failure"]),
                timings_ms={k: float(v) for k, v in entry["timings_ms"].items()},
            )
        )
    return doc["video_id"], doc["config_echo"], results
