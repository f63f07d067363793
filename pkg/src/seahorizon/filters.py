"""Segment filtering: slope gate, length partition, region-of-interest filter.

The chain turns a raw segment soup into horizon candidates:

  slope_filter      drop steep segments
  length_partition  split survivors into confident (longest) and doubtful sets
  roif              keep doubtful segments near some confident line
  assemble_candidates  run the chain and return confident + kept doubtful

All stages are pure and vectorized. The distance test in `roif` is written
as one broadcast expression so that a scalar re-implementation using the
same formula agrees bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import SegmentSet, select


@dataclass
class LsfParams:
    """Slope/length stage knobs.

    slope_threshold: max |dy/dx| kept (vertical segments always drop).
    n_confident: segment count for the confident set.
    n_doubtful: segment count for the doubtful set.
    """

    slope_threshold: float = 0.6
    n_confident: int = 15
    n_doubtful: int = 150

    def __post_init__(self):
        if self.slope_threshold <= 0:
            raise ValueError("slope_threshold must be > 0")
        if self.n_confident < 1:
            raise ValueError("n_confident must be >= 1")
        if self.n_doubtful < 0:
            raise ValueError("n_doubtful must be >= 0")


@dataclass
class RoifParams:
    """distance_threshold: max endpoint-to-line normal distance (pixels)."""

    distance_threshold: float = 2.0

    def __post_init__(self):
        if self.distance_threshold < 0:
            raise ValueError("distance_threshold must be >= 0")


@dataclass
class FilterTrace:
    """Per-stage survivor counts plus ROIF keep decisions, for debugging."""

    n_raw: int = 0
    n_slope_kept: int = 0
    n_confident: int = 0
    n_doubtful: int = 0
    n_doubtful_kept: int = 0
    doubtful_keep_mask: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_raw": self.n_raw,
                "n_slope_kept": self.n_slope_kept,
                "n_confident": self.n_confident,
                "n_doubtful": self.n_doubtful,
                "n_doubtful_kept": self.n_doubtful_kept,
                "doubtful_keep_mask": [bool(v) for v in self.doubtful_keep_mask],
            }
        )


def slope_filter(segs: SegmentSet, params: LsfParams) -> SegmentSet:
    """Keep segments with finite |slope| <= slope_threshold. Order preserved."""
    slope = segs.ensure_slopes()
    keep = np.isfinite(slope) & (np.abs(slope) <= params.slope_threshold)
    return select(segs, np.flatnonzero(keep))


def length_partition(segs: SegmentSet, params: LsfParams) -> tuple[SegmentSet, SegmentSet]:
    """Split by length: the n_confident longest, then the next n_doubtful.

    Both outputs come out longest-first. Ties broken by input position
    (earlier wins) so the partition is deterministic. Anything past
    n_confident + n_doubtful is dropped.
    """
    length = segs.ensure_lengths()
    order = np.argsort(-length, kind="stable")
    confident = select(segs, order[: params.n_confident])
    doubtful = select(segs, order[params.n_confident : params.n_confident + params.n_doubtful])
    return confident, doubtful


def roif_distance_matrices(
    confident: SegmentSet, doubtful: SegmentSet
) -> tuple[np.ndarray, np.ndarray]:
    """Normal distances from every doubtful endpoint to every confident line.

    Returns (d_start, d_end), each (n_confident, n_doubtful): entry [k, h]
    is the perpendicular distance from endpoint h to the infinite line
    through confident segment k.
    """
    alpha = confident.ensure_slopes()
    beta = confident.ys - alpha * confident.xs
    scale = np.sqrt(1.0 + alpha * alpha)[:, None]
    d_start = np.abs(
        alpha[:, None] * doubtful.xs[None, :] + beta[:, None] - doubtful.ys[None, :]
    ) / scale
    d_end = np.abs(
        alpha[:, None] * doubtful.xe[None, :] + beta[:, None] - doubtful.ye[None, :]
    ) / scale
    return d_start, d_end


def roif(
    confident: SegmentSet, doubtful: SegmentSet, params: RoifParams
) -> tuple[SegmentSet, np.ndarray]:
    """Keep each doubtful segment iff some confident line is close to both
    of its endpoints. Returns (kept segments, boolean keep mask over the
    doubtful input). No confident segments: nothing kept.
    """
    if len(doubtful) == 0 or len(confident) == 0:
        keep = np.zeros(len(doubtful), dtype=bool)
        return select(doubtful, np.flatnonzero(keep)), keep
    d_start, d_end = roif_distance_matrices(confident, doubtful)
    near = (d_start <= params.distance_threshold) & (d_end <= params.distance_threshold)
    keep = np.any(near, axis=0)
    return select(doubtful, np.flatnonzero(keep)), keep


def assemble_candidates(
    segs: SegmentSet, lsf: LsfParams, roi: RoifParams
) -> tuple[SegmentSet, FilterTrace]:
    """Run slope -> partition -> ROIF; return confident + kept doubtful.

    Output order: confident set (longest-first) followed by kept doubtful
    segments in their partition order.
    """
    trace = FilterTrace(n_raw=len(segs))
    flat = slope_filter(segs, lsf)
    trace.n_slope_kept = len(flat)
    confident, doubtful = length_partition(flat, lsf)
    trace.n_confident = len(confident)
    trace.n_doubtful = len(doubtful)
    kept, mask = roif(confident, doubtful, roi)
    trace.n_doubtful_kept = len(kept)
    trace.doubtful_keep_mask = mask

    merged = SegmentSet(
        xs=np.concatenate([confident.xs, kept.xs]),
        ys=np.concatenate([confident.ys, kept.ys]),
        xe=np.concatenate([confident.xe, kept.xe]),
        ye=np.concatenate([confident.ye, kept.ye]),
        slope=np.concatenate([confident.ensure_slopes(), kept.ensure_slopes()]),
        length=np.concatenate([confident.ensure_lengths(), kept.ensure_lengths()]),
    )
    return merged, trace
