"""Line segment detection by gradient-orientation region growing.

Pixels whose gradient magnitude exceeds a (deliberately small) threshold are
grouped into connected regions of agreeing gradient orientation, visited in
decreasing magnitude order. Each accepted region is summarized by its
principal axis, giving a sub-pixel segment. Region validation is a simple
size + rectangle-density test; a detector with a stricter acceptance rule
can be swapped in behind :class:`SegmentDetector`.

The growing loop is compiled with numba; everything is single-threaded and
bit-deterministic for a fixed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from numba import njit

from .geometry import SegmentSet, compute_lengths, compute_slopes

DENSITY_THRESHOLD = 0.7
MAG_QUANT_BINS = 1024


@dataclass
class LsdParams:
    """Detector knobs.

    grad_magnitude_threshold: minimum gradient magnitude (gray levels/pixel)
        for a pixel to participate at all. Kept small so weak horizon edges
        still grow into segments.
    angle_tolerance: max deviation (degrees) of a pixel's gradient
        orientation from the running mean orientation of its region.
    min_region_size: minimum pixel count to emit a segment; None scales it
        with image area (the usual -logNT / log10(p) rule).
    """

    grad_magnitude_threshold: float = 2.0
    angle_tolerance: float = 22.5
    min_region_size: int | None = None

    def __post_init__(self):
        if self.grad_magnitude_threshold < 0:
            raise ValueError("grad_magnitude_threshold must be >= 0")
        if not 0.0 < self.angle_tolerance < 90.0:
            raise ValueError("angle_tolerance must be in ]0, 90[ degrees")
        if self.min_region_size is not None and self.min_region_size < 2:
            raise ValueError("min_region_size must be >= 2")

    def resolved_min_region_size(self, width: int, height: int) -> int:
        if self.min_region_size is not None:
            return self.min_region_size
        log_nt = 5.0 * (math.log10(width) + math.log10(height)) / 2.0 + math.log10(11.0)
        p = self.angle_tolerance / 180.0
        return max(2, int(-log_nt / math.log10(p)))


class SegmentDetector(Protocol):
    """Interface for pluggable detectors (same post-conditions, deterministic)."""

    def detect(self, raster: np.ndarray) -> SegmentSet: ...


def _gradient_2x2(raster: np.ndarray):
    """Gradient on 2x2 neighborhoods; cell (y, x) sits at image coordinates
    (x + 0.5, y + 0.5). Returns (level-line angle, magnitude)."""
    a = raster.astype(np.float64)
    gx = (a[:-1, 1:] + a[1:, 1:] - a[:-1, :-1] - a[1:, :-1]) * 0.5
    gy = (a[1:, :-1] + a[1:, 1:] - a[:-1, :-1] - a[:-1, 1:]) * 0.5
    mag = np.sqrt(gx * gx + gy * gy)
    angle = np.arctan2(gx, -gy)
    return angle, mag


@njit(cache=True)
def _grow_region(seed, tau, angle, usable, used, gw, gh, reg):
    """BFS growth from seed; joins 8-neighbors whose orientation stays
    within tau of the region's running mean. Marks pixels used; returns
    the region size (members in reg[:size])."""
    reg[0] = seed
    used[seed] = 1
    theta = angle[seed]
    sdx = math.cos(theta)
    sdy = math.sin(theta)
    size = 1
    i = 0
    while i < size:
        p = reg[i]
        py = p // gw
        px = p - py * gw
        for dy in range(-1, 2):
            ny = py + dy
            if ny < 0 or ny >= gh:
                continue
            for dx in range(-1, 2):
                if dx == 0 and dy == 0:
                    continue
                nx = px + dx
                if nx < 0 or nx >= gw:
                    continue
                q = ny * gw + nx
                if used[q] or not usable[q]:
                    continue
                diff = angle[q] - theta
                while diff <= -math.pi:
                    diff += 2.0 * math.pi
                while diff > math.pi:
                    diff -= 2.0 * math.pi
                if abs(diff) > tau:
                    continue
                used[q] = 1
                reg[size] = q
                size += 1
                sdx += math.cos(angle[q])
                sdy += math.sin(angle[q])
                theta = math.atan2(sdy, sdx)
        i += 1
    return size


@njit(cache=True)
def _region_rect(reg, size, mag, gw, rect):
    """Fit the region's rectangle: magnitude-weighted centroid, principal
    axis of the weighted second moments, extents from projections.
    Writes (cx, cy, dirx, diry, tmin, tmax, smin, smax) into rect."""
    wsum = 0.0
    cx = 0.0
    cy = 0.0
    for j in range(size):
        p = reg[j]
        py = p // gw
        px = p - py * gw
        wgt = mag[p]
        wsum += wgt
        cx += wgt * px
        cy += wgt * py
    cx /= wsum
    cy /= wsum

    ixx = 0.0
    iyy = 0.0
    ixy = 0.0
    for j in range(size):
        p = reg[j]
        py = p // gw
        px = p - py * gw
        wgt = mag[p]
        ux = px - cx
        uy = py - cy
        ixx += wgt * ux * ux
        iyy += wgt * uy * uy
        ixy += wgt * ux * uy
    half = 0.5 * (ixx + iyy)
    disc = math.sqrt(0.25 * (ixx - iyy) * (ixx - iyy) + ixy * ixy)
    lam = half + disc
    dirx = ixy
    diry = lam - ixx
    norm = math.sqrt(dirx * dirx + diry * diry)
    if norm == 0.0:
        if ixx >= iyy:
            dirx, diry = 1.0, 0.0
        else:
            dirx, diry = 0.0, 1.0
    else:
        dirx /= norm
        diry /= norm
    if dirx < 0.0 or (dirx == 0.0 and diry < 0.0):
        dirx = -dirx
        diry = -diry

    tmin = 1e300
    tmax = -1e300
    smin = 1e300
    smax = -1e300
    for j in range(size):
        p = reg[j]
        py = p // gw
        px = p - py * gw
        ux = px - cx
        uy = py - cy
        t = ux * dirx + uy * diry
        sv = -ux * diry + uy * dirx
        if t < tmin:
            tmin = t
        if t > tmax:
            tmax = t
        if sv < smin:
            smin = sv
        if sv > smax:
            smax = sv
    rect[0] = cx
    rect[1] = cy
    rect[2] = dirx
    rect[3] = diry
    rect[4] = tmin
    rect[5] = tmax
    rect[6] = smin
    rect[7] = smax


@njit(cache=True)
def _rect_density(size, rect):
    length = rect[5] - rect[4]
    width = rect[7] - rect[6]
    if length < 1.0:
        length = 1.0
    if width < 1.0:
        width = 1.0
    return size / (length * width)


@njit(cache=True)
def _grow_all(seed_order, angle, mag, usable, gw, gh, tau, min_size, min_length, density_th):
    n = gh * gw
    used = np.zeros(n, dtype=np.uint8)
    reg = np.empty(n, dtype=np.int64)
    rect = np.empty(8, dtype=np.float64)

    max_segs = n // min_size + 1
    out = np.empty((max_segs, 4), dtype=np.float64)
    n_out = 0

    for s in range(seed_order.shape[0]):
        seed = seed_order[s]
        if used[seed]:
            continue

        size = _grow_region(seed, tau, angle, usable, used, gw, gh, reg)
        if size < min_size:
            continue  # too small; pixels stay consumed
        _region_rect(reg, size, mag, gw, rect)

        if _rect_density(size, rect) < density_th:
            # sprawling region: release it and re-grow from the seed with
            # a tolerance taken from the angle spread near the seed
            sy = seed // gw
            sx = seed - sy * gw
            ang_c = angle[seed]
            radius = rect[7] - rect[6]  # rectangle width
            if radius < 1.0:
                radius = 1.0
            a_sum = 0.0
            a_sq = 0.0
            a_n = 0
            for j in range(size):
                p = reg[j]
                used[p] = 0
                py = p // gw
                px = p - py * gw
                d = math.sqrt(float((px - sx) * (px - sx) + (py - sy) * (py - sy)))
                if d < radius:
                    diff = angle[p] - ang_c
                    while diff <= -math.pi:
                        diff += 2.0 * math.pi
                    while diff > math.pi:
                        diff -= 2.0 * math.pi
                    a_sum += diff
                    a_sq += diff * diff
                    a_n += 1
            if a_n == 0:
                continue
            mean_a = a_sum / a_n
            variance = a_sq / a_n - mean_a * mean_a
            tau2 = 2.0 * math.sqrt(variance if variance > 0.0 else 0.0)
            size = _grow_region(seed, tau2, angle, usable, used, gw, gh, reg)
            if size < min_size:
                continue
            _region_rect(reg, size, mag, gw, rect)

            # still too sparse: shrink the region around the seed
            guard = 0
            while _rect_density(size, rect) < density_th and guard < 64:
                guard += 1
                rad = 0.0
                for j in range(size):
                    p = reg[j]
                    py = p // gw
                    px = p - py * gw
                    d = float((px - sx) * (px - sx) + (py - sy) * (py - sy))
                    if d > rad:
                        rad = d
                rad = math.sqrt(rad) * 0.75
                kept = 0
                for j in range(size):
                    p = reg[j]
                    py = p // gw
                    px = p - py * gw
                    d = math.sqrt(float((px - sx) * (px - sx) + (py - sy) * (py - sy)))
                    if d <= rad:
                        reg[kept] = p
                        kept += 1
                    else:
                        used[p] = 0
                if kept == size or kept < min_size:
                    size = kept
                    break
                size = kept
                _region_rect(reg, size, mag, gw, rect)
            if size < min_size or _rect_density(size, rect) < density_th:
                continue

        length = rect[5] - rect[4]
        if length < min_length:
            continue

        # gradient cells live at (+0.5, +0.5) in image coordinates
        out[n_out, 0] = rect[0] + rect[4] * rect[2] + 0.5
        out[n_out, 1] = rect[1] + rect[4] * rect[3] + 0.5
        out[n_out, 2] = rect[0] + rect[5] * rect[2] + 0.5
        out[n_out, 3] = rect[1] + rect[5] * rect[3] + 0.5
        n_out += 1

    return out[:n_out]


def detect_segments(raster: np.ndarray, params: LsdParams) -> SegmentSet:
    """Detect sub-pixel line segments on a grayscale raster (>= 8x8).

    Endpoints are ordered left-to-right; slopes and lengths are cached on
    the returned set. Deterministic: identical input and params give a
    bit-identical result.
    """
    h, w = raster.shape
    if h < 8 or w < 8:
        raise ValueError(f"raster {w}x{h} is too small for segment detection")

    angle, mag = _gradient_2x2(raster)
    usable = mag > params.grad_magnitude_threshold
    angle_flat = np.ascontiguousarray(angle).ravel()
    mag_flat = np.ascontiguousarray(mag).ravel()
    usable_flat = np.ascontiguousarray(usable).ravel()
    candidates = np.flatnonzero(usable_flat)
    if candidates.size == 0:
        segs = SegmentSet.empty()
        segs.ensure_slopes()
        segs.ensure_lengths()
        return segs

    # magnitude-bucketed seed order (descending), ties by pixel index
    mmax = mag_flat[candidates].max()
    quant = (mag_flat[candidates] * ((MAG_QUANT_BINS - 1) / mmax)).astype(np.uint16)
    seed_order = candidates[np.argsort((MAG_QUANT_BINS - 1) - quant, kind="stable")]

    gh, gw = angle.shape
    min_size = params.resolved_min_region_size(w, h)
    coords = _grow_all(
        seed_order,
        angle_flat,
        mag_flat,
        usable_flat,
        gw,
        gh,
        math.radians(params.angle_tolerance),
        min_size,
        min_size / 2.0,
        DENSITY_THRESHOLD,
    )
    segs = SegmentSet.from_endpoints(coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3])
    segs.slope = compute_slopes(segs)
    segs.length = compute_lengths(segs)
    return segs


@dataclass
class GrowingDetector:
    """Default SegmentDetector wrapping :func:`detect_segments`."""

    params: LsdParams

    def detect(self, raster: np.ndarray) -> SegmentSet:
        return detect_segments(raster, self.params)
