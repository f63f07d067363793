"""Frame container, red-channel extraction, and area-average downsampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImageTooSmallError

MIN_RASTER_SIDE = 8


@dataclass
class Frame:
    """One video frame. ``pixels`` is (h, w, 3) RGB uint8 or (h, w) grayscale."""

    pixels: np.ndarray
    frame_index: int = 0
    timestamp: float | None = None

    def __post_init__(self):
        if self.pixels.ndim not in (2, 3):
            raise ValueError("pixels must be 2-D grayscale or 3-D RGB")
        if self.pixels.ndim == 3 and self.pixels.shape[2] != 3:
            raise ValueError("color frames must have exactly 3 channels (RGB)")
        if self.width * self.height == 0:
            raise ValueError("frame has zero area")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def round_half_away(x):
    """Round half away from zero (3.5 -> 4, -3.5 -> -4), elementwise."""
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def extract_red(pixels: np.ndarray) -> np.ndarray:
    """Red channel of an RGB raster; grayscale input passes through."""
    if pixels.ndim == 2:
        return pixels
    return pixels[:, :, 0]


def _box_resample_axis(img: np.ndarray, n_out: int, kappa: float, axis: int) -> np.ndarray:
    """Exact fractional box (area) average along one axis.

    Output sample i averages a source window of width 1/kappa centred on
    source coordinate i/kappa (pixel-centre convention), so every output
    pixel centre corresponds to i/kappa in the source frame.  Windows
    overhanging the borders are clipped and renormalised.  Uses the running
    integral of the piecewise-constant signal so fractional cell coverage
    is exact.
    """
    if axis == 1:
        return _box_resample_axis(img.T, n_out, kappa, 0).T
    n_in = img.shape[0]
    cum = np.zeros((n_in + 1,) + img.shape[1:], dtype=np.float64)
    np.cumsum(img, axis=0, out=cum[1:])

    centers = np.arange(n_out) / kappa
    lo = np.clip(centers - 0.5 / kappa + 0.5, 0.0, n_in)
    hi = np.clip(centers + 0.5 / kappa + 0.5, 0.0, n_in)

    def integral(edges: np.ndarray) -> np.ndarray:
        idx = np.floor(edges).astype(np.intp)
        frac = edges - idx
        cell = np.minimum(idx, n_in - 1)
        return cum[idx] + frac[:, None] * img[cell]

    width = (hi - lo)[:, None]
    return (integral(hi) - integral(lo)) / width


def downsample(raster: np.ndarray, kappa: float) -> np.ndarray:
    """Downscale by factor ``kappa`` in ]0, 1] with area averaging.

    Output dimensions are floor(kappa * w) x floor(kappa * h); anything
    smaller than 8x8 raises ImageTooSmallError. kappa = 1 is the identity
    (useful for debugging even though downsizing normally wants kappa < 1).
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must be in ]0, 1], got {kappa}")
    h, w = raster.shape
    if kappa == 1.0:
        return raster.copy()
    oh, ow = int(np.floor(kappa * h)), int(np.floor(kappa * w))
    if oh < MIN_RASTER_SIDE or ow < MIN_RASTER_SIDE:
        raise ImageTooSmallError(
            f"downsampled size {ow}x{oh} is below {MIN_RASTER_SIDE}x{MIN_RASTER_SIDE}"
        )
    out = _box_resample_axis(raster.astype(np.float64), oh, kappa, axis=0)
    out = _box_resample_axis(out, ow, kappa, axis=1)
    return round_half_away(out).clip(0, 255).astype(np.uint8)
