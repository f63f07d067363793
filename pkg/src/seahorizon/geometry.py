"""Batch segment storage and the elementary vectorized geometry kernels.

Segments are stored as a structure of arrays (one array per endpoint
coordinate) so every filter stage can run as whole-batch numpy expressions.
Coordinates are in the image frame: x rightward, y downward, sub-pixel
doubles. The starting point of a segment is always the left endpoint
(xs <= xe); perfectly vertical segments carry a +inf slope sentinel so any
finite slope threshold rejects them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VERTICAL_SLOPE = np.inf


@dataclass
class LineParams:
    """Slope/intercept form of an infinite line: y = alpha * x + beta."""

    alpha: float
    beta: float


@dataclass
class SegmentSet:
    """Parallel coordinate arrays for a batch of line segments.

    ``slope`` and ``length`` are computed once on demand and then gathered
    by :func:`select` instead of being recomputed for every filtered subset.
    """

    xs: np.ndarray
    ys: np.ndarray
    xe: np.ndarray
    ye: np.ndarray
    slope: np.ndarray | None = field(default=None)
    length: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        self.xe = np.asarray(self.xe, dtype=np.float64)
        self.ye = np.asarray(self.ye, dtype=np.float64)
        n = len(self.xs)
        if not (len(self.ys) == len(self.xe) == len(self.ye) == n):
            raise ValueError("coordinate arrays must have equal length")

    def __len__(self) -> int:
        return len(self.xs)

    @classmethod
    def from_endpoints(cls, xs, ys, xe, ye) -> "SegmentSet":
        """Build a set from arbitrary endpoint pairs, swapping where needed
        so the starting point is the left endpoint of each segment."""
        xs = np.asarray(xs, dtype=np.float64).copy()
        ys = np.asarray(ys, dtype=np.float64).copy()
        xe = np.asarray(xe, dtype=np.float64).copy()
        ye = np.asarray(ye, dtype=np.float64).copy()
        flip = xs > xe
        xs[flip], xe[flip] = xe[flip].copy(), xs[flip].copy()
        ys[flip], ye[flip] = ye[flip].copy(), ys[flip].copy()
        return cls(xs, ys, xe, ye)

    @classmethod
    def empty(cls) -> "SegmentSet":
        z = np.zeros(0, dtype=np.float64)
        return cls(z, z.copy(), z.copy(), z.copy())

    def ensure_slopes(self) -> np.ndarray:
        if self.slope is None:
            self.slope = compute_slopes(self)
        return self.slope

    def ensure_lengths(self) -> np.ndarray:
        if self.length is None:
            self.length = compute_lengths(self)
        return self.length


def compute_slopes(segs: SegmentSet) -> np.ndarray:
    """Component-wise slope (ye - ys) / (xe - xs).

    Vertical segments (zero run) get the +inf sentinel rather than a
    division error, so |slope| <= threshold tests exclude them naturally.
    """
    dx = segs.xe - segs.xs
    dy = segs.ye - segs.ys
    out = np.full(len(segs), VERTICAL_SLOPE, dtype=np.float64)
    np.divide(dy, dx, out=out, where=dx != 0)
    return out


def compute_lengths(segs: SegmentSet) -> np.ndarray:
    """Euclidean segment lengths, element-wise over the batch."""
    return np.sqrt((segs.xe - segs.xs) ** 2 + (segs.ye - segs.ys) ** 2)


def point_line_distance(line: LineParams, px, py):
    """Normal distance from point(s) (px, py) to y = alpha*x + beta.

    Accepts scalars or arrays; broadcasting follows numpy rules.
    """
    return np.abs(line.alpha * px + line.beta - py) / np.sqrt(1.0 + line.alpha * line.alpha)


def select(segs: SegmentSet, idx) -> SegmentSet:
    """Gather rows of ``segs`` at ``idx``, carrying cached slopes/lengths.

    Raises IndexError for out-of-range indices (contract violation).
    """
    idx = np.asarray(idx, dtype=np.intp)
    n = len(segs)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"segment index out of range for set of size {n}")
    out = SegmentSet(segs.xs[idx], segs.ys[idx], segs.xe[idx], segs.ye[idx])
    if segs.slope is not None:
        out.slope = segs.slope[idx]
    if segs.length is not None:
        out.length = segs.length[idx]
    return out
