"""Annotation ingestion, error metrics, and result persistence."""

import math

import numpy as np
import pytest

from seahorizon.errors import AnnotationError
from seahorizon.evaluate import (
    ErrorRecord,
    GtAnnotation,
    compute_errors,
    left_edge_to_center,
    load_annotations,
    read_results,
    summarize,
    write_annotations,
    write_results,
)
from seahorizon.inference import HorizonLine
from seahorizon.pipeline import FrameResult


def write_csv(path, rows, header="frame_index,y_gt_px,phi_gt_deg"):
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")


def result(idx, y=None, phi=None, failure=False):
    line = None if y is None else HorizonLine(y, phi or 0.0)
    return FrameResult(frame_index=idx, line=line, outlier=False, failure=failure,
                       timings_ms={"total": 10.0})


def test_load_annotations_row(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, ["12,345.5,0.8"])
    assert load_annotations(p) == {12: GtAnnotation(12, 345.5, 0.8)}


def test_load_annotations_header_only(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, [])
    assert load_annotations(p) == {}


def test_load_annotations_bad_header(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, ["0,1,2"], header="frame,y,phi")
    with pytest.raises(AnnotationError, match="bad header"):
        load_annotations(p)


def test_load_annotations_duplicate(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, ["0,10,0", "0,11,0"])
    with pytest.raises(AnnotationError, match="duplicate frame_index 0"):
        load_annotations(p)


def test_load_annotations_malformed_names_line(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, ["0,10,0", "1,oops,0"])
    with pytest.raises(AnnotationError, match=":3:"):
        load_annotations(p)
    write_csv(p, ["0,10"])
    with pytest.raises(AnnotationError, match="expected 3 fields"):
        load_annotations(p)


def test_left_edge_conversion():
    # left-edge height 100 px, 5 degree tilt, 641-wide image
    expected = 100.0 + (-math.tan(math.radians(5.0))) * 320.0
    assert math.isclose(left_edge_to_center(100.0, 5.0, 641), expected)
    assert left_edge_to_center(77.0, 0.0, 1280) == 77.0


def test_load_annotations_left_edge_mode(tmp_path):
    p = tmp_path / "gt.csv"
    write_csv(p, ["0,100.0,5.0"])
    anns = load_annotations(p, left_edge_width=641)
    assert math.isclose(anns[0].y_gt, left_edge_to_center(100.0, 5.0, 641))


def test_annotation_round_trip(tmp_path):
    p = tmp_path / "gt.csv"
    original = [GtAnnotation(0, 123.456789012345, -0.1), GtAnnotation(1, 7.25, 14.0)]
    write_annotations(p, original)
    back = load_annotations(p)
    assert back[0] == original[0] and back[1] == original[1]


def test_compute_errors_skips_failures():
    results = [result(0, 100.0, 1.0), result(1, failure=True), result(2, 50.0, 0.0)]
    anns = {0: GtAnnotation(0, 98.0, 0.5), 2: GtAnnotation(2, 55.0, 0.0)}
    errors = compute_errors(results, anns)
    assert [e.frame_index for e in errors] == [0, 2]
    assert errors[0].y_err == 2.0 and errors[0].phi_err == 0.5
    assert errors[1].y_err == 5.0


def test_compute_errors_unmatched_index():
    results = [result(0, 1.0, 0.0), result(5, 1.0, 0.0)]
    with pytest.raises(AnnotationError, match="5"):
        compute_errors(results, {0: GtAnnotation(0, 1.0, 0.0)})


def test_summarize_known_values():
    errors = [ErrorRecord(i, float(v), float(v) / 10.0) for i, v in enumerate([1, 2, 3, 4])]
    summary = summarize(errors, [10.0, 20.0])
    assert summary.y_err.mu == 2.5
    assert summary.y_err.q50 == 2.5
    assert summary.mean_time_ms == 15.0
    # population sigma of [1,2,3,4]
    assert math.isclose(summary.y_err.sigma, math.sqrt(1.25))


def test_summarize_constant_values():
    errors = [ErrorRecord(i, 3.0, 0.25) for i in range(7)]
    s = summarize(errors, [1.0])
    assert s.y_err.sigma == 0.0
    assert s.y_err.q25 == s.y_err.q50 == s.y_err.q75 == s.y_err.q95 == 3.0


def test_summarize_empty_rejected():
    with pytest.raises(ValueError):
        summarize([], [1.0])


def brute_quantile(values, q):
    data = sorted(values)
    pos = (len(data) - 1) * q
    lo = int(math.floor(pos))
    hi = int(math.ceil(pos))
    return data[lo] + (data[hi] - data[lo]) * (pos - lo)


def test_summarize_matches_brute_force():
    rng = np.random.default_rng(20)
    for _ in range(100):
        n = int(rng.integers(1, 200))
        vals = rng.uniform(0, 50, n)
        errors = [ErrorRecord(i, float(v), float(v) * 0.3) for i, v in enumerate(vals)]
        s = summarize(errors, [1.0])
        assert abs(s.y_err.mu - float(np.mean(vals))) < 1e-9
        assert abs(s.y_err.sigma - float(np.std(vals))) < 1e-9
        for q, got in ((0.25, s.y_err.q25), (0.5, s.y_err.q50),
                       (0.75, s.y_err.q75), (0.95, s.y_err.q95)):
            assert abs(got - brute_quantile(vals, q)) < 1e-9


def test_results_round_trip(tmp_path):
    rng = np.random.default_rng(25)
    results = []
    for i in range(100):
        if i % 10 == 9:
            results.append(result(i, failure=True))
        else:
            results.append(result(i, float(rng.uniform(0, 479)), float(rng.uniform(-10, 10))))
    path = tmp_path / "results.json"
    write_results(path, results, video_id="clip-7", config_echo={"kappa": 0.5})
    video_id, echo, back = read_results(path)
    assert video_id == "clip-7" and echo == {"kappa": 0.5}
    assert len(back) == 100
    for orig, rt in zip(results, back):
        assert rt.frame_index == orig.frame_index
        assert rt.failure == orig.failure
        if orig.line is None:
            assert rt.line is None
        else:
            assert rt.line.y == orig.line.y and rt.line.phi == orig.line.phi
        assert rt.timings_ms == orig.timings_ms


def test_results_empty_document(tmp_path):
    path = tmp_path / "results.json"
    write_results(path, [], video_id="empty", config_echo={})
    _, _, back = read_results(path)
    assert back == []
