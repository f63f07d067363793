"""Gradient-orientation region growing on synthetic rasters."""

import math

import numpy as np
import pytest

from seahorizon.lsd import GrowingDetector, LsdParams, detect_segments


def step_image(h=200, w=200, row=100, above=80, below=180):
    img = np.full((h, w), above, np.uint8)
    img[row:, :] = below
    return img


def test_constant_raster_empty():
    segs = detect_segments(np.full((64, 64), 50, np.uint8), LsdParams())
    assert len(segs) == 0


def test_step_edge_single_segment():
    segs = detect_segments(step_image(), LsdParams())
    assert len(segs) == 1
    span = float(segs.xe[0] - segs.xs[0])
    assert span >= 0.9 * 200
    assert abs(segs.ys[0] - 100) <= 1.0 and abs(segs.ye[0] - 100) <= 1.0
    slope = (segs.ye[0] - segs.ys[0]) / (segs.xe[0] - segs.xs[0])
    assert abs(slope) <= 0.01


def test_weak_blurred_edge_detected():
    # Amplitude 10 step smoothed with a Gaussian profile; the low magnitude
    # threshold must still pick up the edge (possibly in pieces).
    ys = np.arange(200, dtype=np.float64)
    z = (ys - 100.0) / math.sqrt(2.0)
    profile = 80.0 + 10.0 * 0.5 * (1.0 + np.array([math.erf(v) for v in z]))
    img = np.round(np.tile(profile[:, None], (1, 200))).astype(np.uint8)
    segs = detect_segments(img, LsdParams(grad_magnitude_threshold=2.0))
    assert len(segs) >= 1
    on_edge = np.abs((segs.ys + segs.ye) / 2.0 - 100.0) <= 2.0
    assert on_edge.any()


def test_tilted_edge():
    # anti-aliased boundary (coverage blend), as the downsampler produces;
    # a hard integer staircase would scatter the gradient orientations
    ys = np.arange(200, dtype=np.float64)[:, None]
    xs = np.arange(300, dtype=np.float64)[None, :]
    cov = np.clip(ys - (120.0 - 0.15 * xs) + 0.5, 0.0, 1.0)
    img = np.round(70.0 + cov * 120.0).astype(np.uint8)
    segs = detect_segments(img, LsdParams())
    assert len(segs) >= 1
    longest = int(np.argmax(segs.length))
    slope = (segs.ye[longest] - segs.ys[longest]) / (segs.xe[longest] - segs.xs[longest])
    assert abs(slope - (-0.15)) <= 0.02


def test_determinism():
    rng = np.random.default_rng(9)
    img = (rng.uniform(0, 255, (120, 160))).astype(np.uint8)
    a = detect_segments(img, LsdParams())
    b = detect_segments(img, LsdParams())
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    assert np.array_equal(a.xe, b.xe) and np.array_equal(a.ye, b.ye)


def test_rotation_symmetry():
    img = np.full((160, 240), 90, np.uint8)
    img[60:, :] = 170
    for x in range(240):
        y = int(110 + 0.2 * x)
        if y < 160:
            img[y:, x] = 60
    fwd = detect_segments(img, LsdParams())
    rot = detect_segments(img[::-1, ::-1].copy(), LsdParams())
    assert len(fwd) == len(rot) and len(fwd) >= 1
    h, w = img.shape
    for i in range(len(fwd)):
        # a segment maps to (W-1-x, H-1-y) with endpoints swapped
        mapped = (w - 1 - fwd.xe[i], h - 1 - fwd.ye[i], w - 1 - fwd.xs[i], h - 1 - fwd.ys[i])
        best = min(
            max(
                abs(mapped[0] - rot.xs[j]),
                abs(mapped[1] - rot.ys[j]),
                abs(mapped[2] - rot.xe[j]),
                abs(mapped[3] - rot.ye[j]),
            )
            for j in range(len(rot))
        )
        assert best <= 1.0


def test_minimum_length_bound():
    rng = np.random.default_rng(17)
    img = (rng.uniform(0, 255, (100, 100))).astype(np.uint8)
    params = LsdParams(min_region_size=20)
    segs = detect_segments(img, params)
    if len(segs):
        assert float(segs.length.min()) >= 10.0  # min_region_size / 2


def test_too_small_raster_rejected():
    with pytest.raises(ValueError):
        detect_segments(np.zeros((7, 40), np.uint8), LsdParams())
    with pytest.raises(ValueError):
        detect_segments(np.zeros((40, 7), np.uint8), LsdParams())


def test_detector_interface():
    det = GrowingDetector(LsdParams())
    segs = det.detect(step_image())
    assert len(segs) == 1


def test_param_validation():
    with pytest.raises(ValueError):
        LsdParams(grad_magnitude_threshold=-1.0)
    with pytest.raises(ValueError):
        LsdParams(angle_tolerance=0.0)
    with pytest.raises(ValueError):
        LsdParams(angle_tolerance=95.0)
    with pytest.raises(ValueError):
        LsdParams(min_region_size=1)
