"""Slope/length filtering and the region-of-interest segment filter."""

import json
import math

import numpy as np

from seahorizon.filters import (
    FilterTrace,
    LsfParams,
    RoifParams,
    assemble_candidates,
    length_partition,
    roif,
    roif_distance_matrices,
    slope_filter,
)
from seahorizon.geometry import SegmentSet


def make_set(coords):
    xs, ys, xe, ye = (np.asarray(v, dtype=np.float64) for v in zip(*coords))
    return SegmentSet.from_endpoints(xs, ys, xe, ye)


def from_slopes_lengths(slopes, lengths):
    """Build segments with prescribed slope and length, start at origin."""
    out = []
    for a, ln in zip(slopes, lengths):
        if math.isinf(a):
            out.append((0.0, 0.0, 0.0, ln))
        else:
            dx = ln / math.hypot(1.0, a)
            out.append((0.0, 0.0, dx, a * dx))
    return make_set(out)


def endpoints(segs):
    return {tuple(row) for row in zip(segs.xs, segs.ys, segs.xe, segs.ye)}


def test_slope_filter_example():
    s = from_slopes_lengths([0.05, 0.2, -0.08], [10, 10, 10])
    kept = slope_filter(s, LsfParams(slope_threshold=0.09))
    assert endpoints(kept) == endpoints(
        from_slopes_lengths([0.05, -0.08], [10, 10])
    )


def test_slope_filter_boundary_kept():
    s = from_slopes_lengths([0.09, 0.091], [10, 10])
    kept = slope_filter(s, LsfParams(slope_threshold=0.09))
    assert len(kept) == 1
    assert math.isclose(kept.ys[0], 0.0) and kept.ye[0] > 0


def test_slope_filter_rejects_vertical():
    s = from_slopes_lengths([math.inf, 0.0], [10, 10])
    kept = slope_filter(s, LsfParams(slope_threshold=0.6))
    assert len(kept) == 1


def test_slope_filter_empty():
    assert len(slope_filter(SegmentSet.empty(), LsfParams())) == 0


def test_length_partition_tie_break():
    s = from_slopes_lengths([0.0, 0.0, 0.0, 0.0], [9, 7, 7, 3])
    conf, doubt = length_partition(s, LsfParams(n_confident=1, n_doubtful=2))
    assert conf.length.tolist() == [9.0]
    assert doubt.length.tolist() == [7.0, 7.0]
    # the tie keeps original order: segment 1 before segment 2
    assert doubt.xe[0] == s.xe[1] and doubt.xe[1] == s.xe[2]


def test_length_partition_clamps():
    s = from_slopes_lengths([0.0, 0.0], [5, 4])
    conf, doubt = length_partition(s, LsfParams(n_confident=10, n_doubtful=10))
    assert len(conf) == 2 and len(doubt) == 0


def test_length_partition_top_fifteen():
    rng = np.random.default_rng(3)
    s = from_slopes_lengths([0.0] * 100, rng.uniform(5, 400, 100))
    conf, doubt = length_partition(s, LsfParams(n_confident=15, n_doubtful=150))
    assert len(conf) == 15 and len(doubt) == 85
    assert conf.length.min() >= doubt.length.max()


def test_roif_example():
    conf = make_set([(0, 10, 100, 10)])  # y = 10
    doubt = make_set([(20, 10.5, 30, 10.4), (20, 20, 30, 20)])
    kept, mask = roif(conf, doubt, RoifParams(distance_threshold=2.0))
    assert mask.tolist() == [True, False]
    assert len(kept) == 1 and kept.ys[0] == 10.5


def test_roif_boundary_distance_kept():
    conf = make_set([(0, 10, 100, 10)])
    doubt = make_set([(20, 12, 30, 10)])  # start exactly 2 px off, end on line
    kept, mask = roif(conf, doubt, RoifParams(distance_threshold=2.0))
    assert mask.tolist() == [True]
    kept, mask = roif(conf, doubt, RoifParams(distance_threshold=1.999))
    assert mask.tolist() == [False]


def test_roif_empty_sides():
    conf = make_set([(0, 10, 100, 10)])
    kept, mask = roif(conf, SegmentSet.empty(), RoifParams())
    assert len(kept) == 0 and mask.shape == (0,)
    kept, mask = roif(SegmentSet.empty(), conf, RoifParams())
    assert len(kept) == 0 and not mask.any()


def test_roif_monotone_in_threshold():
    rng = np.random.default_rng(11)
    for _ in range(25):
        conf = random_set(rng, rng.integers(1, 6))
        doubt = random_set(rng, rng.integers(1, 40))
        t1, t2 = sorted(rng.uniform(0.5, 30.0, 2))
        _, m1 = roif(conf, doubt, RoifParams(float(t1)))
        _, m2 = roif(conf, doubt, RoifParams(float(t2)))
        assert np.all(m2[m1]), "smaller threshold kept a segment the larger lost"


def test_roif_translation_invariant():
    rng = np.random.default_rng(12)
    for _ in range(25):
        conf = random_set(rng, 4)
        doubt = random_set(rng, 30)
        dx, dy = rng.uniform(-500, 500, 2)
        _, m0 = roif(conf, doubt, RoifParams(2.0))
        _, m1 = roif(shift(conf, dx, dy), shift(doubt, dx, dy), RoifParams(2.0))
        assert np.array_equal(m0, m1)


def random_set(rng, n):
    xs = rng.uniform(0, 960, n)
    ys = rng.uniform(0, 540, n)
    ang = rng.uniform(-0.5, 0.5, n)  # keep slopes finite and shallow
    ln = rng.uniform(2, 200, n)
    return SegmentSet.from_endpoints(
        xs, ys, xs + ln * np.cos(ang), ys + ln * np.sin(ang)
    )


def shift(segs, dx, dy):
    return SegmentSet.from_endpoints(
        segs.xs + dx, segs.ys + dy, segs.xe + dx, segs.ye + dy
    )


def scalar_roif_mask(conf, doubt, t):
    """Per-segment double loop over endpoint/line distances."""
    keep = []
    for l in range(len(doubt)):
        ok = False
        for k in range(len(conf)):
            a = (conf.ye[k] - conf.ys[k]) / (conf.xe[k] - conf.xs[k])
            b = conf.ys[k] - a * conf.xs[k]
            norm = math.sqrt(1.0 + a * a)
            ds = abs(a * doubt.xs[l] + b - doubt.ys[l]) / norm
            de = abs(a * doubt.xe[l] + b - doubt.ye[l]) / norm
            if ds <= t and de <= t:
                ok = True
                break
        keep.append(ok)
    return np.array(keep, dtype=bool)


def test_roif_matches_scalar_oracle():
    rng = np.random.default_rng(21)
    for _ in range(50):
        conf = random_set(rng, rng.integers(1, 16))
        doubt = random_set(rng, rng.integers(0, 60))
        t = float(rng.uniform(0.5, 10.0))
        _, mask = roif(conf, doubt, RoifParams(t))
        assert np.array_equal(mask, scalar_roif_mask(conf, doubt, t))


def test_roif_distance_matrices_shapes():
    rng = np.random.default_rng(22)
    conf = random_set(rng, 5)
    doubt = random_set(rng, 12)
    d_start, d_end = roif_distance_matrices(conf, doubt)
    assert d_start.shape == (5, 12) and d_end.shape == (5, 12)
    assert (d_start >= 0).all() and (d_end >= 0).all()


def test_assemble_candidates_counts():
    rng = np.random.default_rng(23)
    segs = random_set(rng, 300)
    lsf = LsfParams(slope_threshold=0.6, n_confident=15, n_doubtful=150)
    final, trace = assemble_candidates(segs, lsf, RoifParams(2.0))
    assert trace.n_raw == 300
    assert trace.n_confident + trace.n_doubtful_kept == len(final)
    assert trace.n_confident + trace.n_doubtful <= trace.n_slope_kept
    assert trace.doubtful_keep_mask.shape == (trace.n_doubtful,)


def test_filter_trace_json():
    trace = FilterTrace(
        n_raw=5,
        n_slope_kept=4,
        n_confident=2,
        n_doubtful=2,
        n_doubtful_kept=1,
        doubtful_keep_mask=np.array([True, False]),
    )
    doc = json.loads(trace.to_json())
    assert doc["n_raw"] == 5
    assert doc["doubtful_keep_mask"] == [True, False]
