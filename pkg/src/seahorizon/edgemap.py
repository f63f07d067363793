"""Edge-map construction and full-resolution reconstruction.

Surviving segments are rasterized into sub-pixel point chains, stamped into
a binary map at the working (downsampled) scale, then brought back to the
original resolution: bilinear upsample -> column-wise non-maximum
suppression -> threshold. The result is a one-pixel-thick (per column)
binary edge map suitable for voting.

Grid alignment: coordinate x' in the downsampled map corresponds to x'/kappa
in the full-resolution map, i.e. output pixel X samples the small map at
X * kappa. Rows of the small grid therefore reappear exactly on full-res
rows, which is what lets a threshold as high as 254 survive interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .geometry import SegmentSet
from .preprocess import round_half_away

EDGE_THRESHOLD_DEFAULT = 254


@dataclass
class EdgeMap:
    """A 2-D intensity raster plus the scale it lives at.

    Binary maps hold only {0, 255}; the grayscale intermediate produced by
    upsampling is also carried in this type (scale "original").
    """

    pixels: np.ndarray
    scale: Literal["downsampled", "original"]

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ValueError("edge map must be 2-D")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def is_binary(self) -> bool:
        return bool(np.isin(self.pixels, (0, 255)).all())

    def edge_points(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, y) integer coordinates of all nonzero pixels, row-major order."""
        ys, xs = np.nonzero(self.pixels)
        return xs, ys

    def to_png(self, path) -> None:
        from PIL import Image

        Image.fromarray(self.pixels.astype(np.uint8), mode="L").save(path, format="PNG")


@dataclass
class EdgeCoords:
    """Parallel arrays of sub-pixel point coordinates along segments."""

    x_out: np.ndarray
    y_out: np.ndarray

    def __post_init__(self):
        if self.x_out.shape != self.y_out.shape:
            raise ValueError("x_out and y_out must have equal length")

    def __len__(self) -> int:
        return int(self.x_out.shape[0])


def rasterize_segment(
    xs: float, ys: float, xe: float, ye: float, length: float
) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced points along one segment, endpoints reproduced exactly.

    The sample count is the rounded segment length (at least 2); a segment
    shorter than 1 px collapses to its start point.
    """
    if length < 1.0:
        return np.array([xs]), np.array([ys])
    n = max(2, int(round_half_away(length)))
    j = np.arange(n, dtype=np.float64)
    step = n - 1.0
    px = (xe - xs) / step * j + xs
    py = (ye - ys) / step * j + ys
    px[-1] = xe  # the formula's last sample only matches to rounding error
    py[-1] = ye
    return px, py


def rasterize_segments(segs: SegmentSet, width: int, height: int) -> EdgeCoords:
    """Point chains for every segment, clamped into the raster bounds."""
    lengths = segs.ensure_lengths()
    xs_parts = []
    ys_parts = []
    for i in range(len(segs)):
        px, py = rasterize_segment(segs.xs[i], segs.ys[i], segs.xe[i], segs.ye[i], lengths[i])
        xs_parts.append(px)
        ys_parts.append(py)
    if not xs_parts:
        return EdgeCoords(np.zeros(0), np.zeros(0))
    x_out = np.clip(np.concatenate(xs_parts), 0.0, width - 1.0)
    y_out = np.clip(np.concatenate(ys_parts), 0.0, height - 1.0)
    return EdgeCoords(x_out, y_out)


def build_downsampled_map(coords: EdgeCoords, width: int, height: int) -> EdgeMap:
    """Stamp 255 at each rounded coordinate; duplicates collapse."""
    pixels = np.zeros((height, width), dtype=np.uint8)
    if len(coords):
        xi = np.clip(round_half_away(coords.x_out), 0, width - 1).astype(np.intp)
        yi = np.clip(round_half_away(coords.y_out), 0, height - 1).astype(np.intp)
        pixels[yi, xi] = 255
    return EdgeMap(pixels, "downsampled")


def upsample_bilinear(eprime: EdgeMap, kappa: float, original_size: tuple[int, int]) -> EdgeMap:
    """Bilinear upsample to (height, width); output X samples input at X*kappa.

    Separable, float32 accumulation, clamp-to-edge at the borders. Returned
    grayscale map is tagged "original".
    """
    height, width = original_size
    src = eprime.pixels.astype(np.float32)
    sh, sw = src.shape

    ys = np.arange(height, dtype=np.float64) * kappa
    y0 = np.floor(ys).astype(np.intp)
    fy = (ys - y0).astype(np.float32)
    y0 = np.clip(y0, 0, sh - 1)
    y1 = np.clip(y0 + 1, 0, sh - 1)

    xs = np.arange(width, dtype=np.float64) * kappa
    x0 = np.floor(xs).astype(np.intp)
    fx = (xs - x0).astype(np.float32)
    x0 = np.clip(x0, 0, sw - 1)
    x1 = np.clip(x0 + 1, 0, sw - 1)

    rows = src[y0] * (1.0 - fy)[:, None] + src[y1] * fy[:, None]
    out = rows[:, x0] * (1.0 - fx)[None, :] + rows[:, x1] * fx[None, :]
    return EdgeMap(out, "original")


def nonmax_suppress_columns(pixels: np.ndarray) -> np.ndarray:
    """Column-wise vertical NMS; on a plateau only the topmost pixel stays."""
    keep = np.ones(pixels.shape, dtype=bool)
    keep[1:] &= pixels[1:] > pixels[:-1]
    keep[:-1] &= pixels[:-1] >= pixels[1:]
    return keep


def reconstruct_full_map(
    eprime: EdgeMap,
    kappa: float,
    original_size: tuple[int, int],
    edge_threshold: int = EDGE_THRESHOLD_DEFAULT,
) -> EdgeMap:
    """Full-resolution binary edge map: upsample, suppress, threshold."""
    egray = upsample_bilinear(eprime, kappa, original_size)
    keep = nonmax_suppress_columns(egray.pixels) & (egray.pixels >= edge_threshold)
    return EdgeMap(np.where(keep, 255, 0).astype(np.uint8), "original")
