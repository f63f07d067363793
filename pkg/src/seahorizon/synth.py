"""Synthetic maritime scene generator, the accuracy oracle for testing.

Scenes are grayscale (replicated to RGB): a sky with a vertical intensity
gradient above the horizon line, a sea with its own gradient below it, a
configurable contrast step exactly at the line, optional wave texture,
sun glints, occluding rectangles, and additive Gaussian noise. The single
boundary pixel row is coverage-blended so the edge sits at the sub-pixel
ground-truth position; everything else reproduces the configured
intensities exactly in the noise-free case.

Generation is deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .evaluate import GtAnnotation
from .preprocess import Frame, round_half_away


@dataclass(frozen=True)
class OccluderRect:
    """Opaque rectangle (ship, shore) painted over the scene."""

    x: int
    y: int
    width: int
    height: int
    intensity: float = 40.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("occluder width/height must be >= 1")
        if not 0.0 <= self.intensity <= 255.0:
            raise ValueError("occluder intensity must be in [0, 255]")


@dataclass
class SyntheticSceneParams:
    """Scene description; see module docstring for the composition rules.

    The sea base intensity is derived: sky value at the line minus
    horizon_contrast, so the step across the horizon is exactly the
    configured number of gray levels everywhere along the line.
    """

    width: int = 1280
    height: int = 720
    y_gt: float = 360.0
    phi_gt: float = 0.0
    sky_base: float = 170.0
    sky_gradient: float = -25.0
    sea_gradient: float = 18.0
    horizon_contrast: float = 60.0
    wave_amplitude: float = 0.0
    wave_frequency: float = 0.06
    glint_count: int = 0
    glint_brightness: float = 60.0
    occluders: tuple[OccluderRect, ...] = ()
    noise_sigma: float = 0.0
    seed: int = 0
    frame_index: int = 0

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("width/height must be >= 16")
        if not 0.0 <= self.sky_base <= 255.0:
            raise ValueError("sky_base must be in [0, 255]")
        if not abs(self.phi_gt) < 60.0:
            raise ValueError("phi_gt must satisfy |phi_gt| < 60 degrees")
        if not 0.0 < self.y_gt < self.height:
            raise ValueError("y_gt must lie inside the image")
        if self.horizon_contrast < 0:
            raise ValueError("horizon_contrast must be >= 0")
        if self.wave_amplitude < 0 or self.wave_frequency <= 0:
            raise ValueError("wave_amplitude must be >= 0 and wave_frequency > 0")
        if self.glint_count < 0:
            raise ValueError("glint_count must be >= 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


def generate_scene(params: SyntheticSceneParams) -> tuple[Frame, GtAnnotation]:
    """Render one scene; returns the frame and its ground-truth annotation."""
    p = params
    rng = np.random.default_rng(p.seed)
    h, w = p.height, p.width
    xc = (w - 1) / 2.0
    alpha = -math.tan(math.radians(p.phi_gt))

    xs = np.arange(w, dtype=np.float64)[None, :]
    ys = np.arange(h, dtype=np.float64)[:, None]
    y_line = p.y_gt + alpha * (xs - xc)
    depth = ys - y_line  # >0 below the horizon (sea side)

    span = float(h - 1)
    sky = p.sky_base + p.sky_gradient * (ys / span)
    sky_at_line = p.sky_base + p.sky_gradient * (y_line / span)
    sea = sky_at_line - p.horizon_contrast + p.sea_gradient * (depth / span)

    # rng draws happen unconditionally and in a fixed order so that scenes
    # differing only in one feature toggle still share the other draws
    phase1, phase2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    if p.wave_amplitude > 0:
        fade = np.clip(depth / max(6.0, 0.05 * h), 0.0, 1.0)
        two_pi_f = 2.0 * math.pi * p.wave_frequency
        wave = 0.67 * np.sin(two_pi_f * xs + 0.9 * depth + phase1)
        wave = wave + 0.33 * np.sin(2.7 * two_pi_f * xs - 0.6 * depth + phase2)
        sea = sea + p.wave_amplitude * fade * wave

    cov = np.clip(depth + 0.5, 0.0, 1.0)
    img = sky * (1.0 - cov) + sea * cov

    for _ in range(p.glint_count):
        gx = rng.uniform(0.0, w - 1.0)
        line_y = p.y_gt + alpha * (gx - xc)
        lo = min(line_y + 3.0, h - 2.0)
        gy = rng.uniform(lo, h - 1.0)
        sigma = rng.uniform(0.6, 1.6)
        gain = p.glint_brightness * rng.uniform(0.5, 1.0)
        x0 = max(0, int(gx) - 4)
        x1 = min(w, int(gx) + 5)
        y0 = max(0, int(gy) - 4)
        y1 = min(h, int(gy) + 5)
        wy = np.arange(y0, y1, dtype=np.float64)[:, None]
        wx = np.arange(x0, x1, dtype=np.float64)[None, :]
        blob = gain * np.exp(-((wx - gx) ** 2 + (wy - gy) ** 2) / (2.0 * sigma * sigma))
        img[y0:y1, x0:x1] += blob

    for rect in p.occluders:
        x0 = max(0, rect.x)
        y0 = max(0, rect.y)
        x1 = min(w, rect.x + rect.width)
        y1 = min(h, rect.y + rect.height)
        if x0 < x1 and y0 < y1:
            img[y0:y1, x0:x1] = rect.intensity

    if p.noise_sigma > 0:
        img = img + rng.normal(0.0, p.noise_sigma, size=img.shape)

    gray = np.clip(round_half_away(img), 0.0, 255.0).astype(np.uint8)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    frame = Frame(pixels=rgb, frame_index=p.frame_index)
    return frame, GtAnnotation(p.frame_index, p.y_gt, p.phi_gt)


@dataclass
class TrajectoryParams:
    """Sinusoidal pitch/roll motion for multi-frame sequences."""

    n_frames: int = 50
    y_amplitude: float = 0.0
    y_period: float = 40.0
    phi_amplitude: float = 0.0
    phi_period: float = 60.0

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be >= 1")
        if self.y_period <= 0 or self.phi_period <= 0:
            raise ValueError("periods must be positive")


def generate_sequence(
    scene: SyntheticSceneParams, traj: TrajectoryParams
) -> Iterator[tuple[Frame, GtAnnotation]]:
    """Frames 0..n-1 along the trajectory; per-frame noise reseeded."""
    for i in range(traj.n_frames):
        y_i = scene.y_gt + traj.y_amplitude * math.sin(2.0 * math.pi * i / traj.y_period)
        phi_i = scene.phi_gt + traj.phi_amplitude * math.sin(2.0 * math.pi * i / traj.phi_period)
        params_i = replace(scene, y_gt=y_i, phi_gt=phi_i, seed=scene.seed + i, frame_index=i)
        yield generate_scene(params_i)


_SCENE_KEYS = {
    "width", "height", "y_gt", "phi_gt", "sky_base", "sky_gradient", "sea_gradient",
    "horizon_contrast", "wave_amplitude", "wave_frequency", "glint_count",
    "glint_brightness", "noise_sigma", "seed",
}
_TRAJ_KEYS = {"n_frames", "y_amplitude", "y_period", "phi_amplitude", "phi_period"}


def params_from_mapping(mapping: dict) -> tuple[SyntheticSceneParams, TrajectoryParams]:
    """Build scene + trajectory params from one flat mapping (TOML file).

    Occluders are given as arrays [x, y, width, height, intensity]. Unknown
    keys raise ValueError naming the key.
    """
    unknown = sorted(set(mapping) - _SCENE_KEYS - _TRAJ_KEYS - {"occluders"})
    if unknown:
        raise ValueError(f"unknown synthetic-scene keys: {', '.join(unknown)}")
    scene_kwargs = {k: mapping[k] for k in _SCENE_KEYS if k in mapping}
    if "occluders" in mapping:
        rects = []
        for spec in mapping["occluders"]:
            if len(spec) not in (4, 5):
                raise ValueError("occluders entries must be [x, y, width, height(, intensity)]")
            rects.append(OccluderRect(int(spec[0]), int(spec[1]), int(spec[2]), int(spec[3]),
                                       float(spec[4]) if len(spec) == 5 else 40.0))
        scene_kwargs["occluders"] = tuple(rects)
    traj_kwargs = {k: mapping[k] for k in _TRAJ_KEYS if k in mapping}
    return SyntheticSceneParams(**scene_kwargs), TrajectoryParams(**traj_kwargs)
