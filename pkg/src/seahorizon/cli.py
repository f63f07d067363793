"""Command-line interface.

Subcommands: detect (one image), run (a frame stream), eval (metrics from
results + annotations), bench (timing report), debug-dump (intermediate
artifacts), synth (synthetic dataset generation).

Exit codes: 0 success, 1 I/O or input-data error, 2 no detection,
64 usage error.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .config import DetectorConfig, config_with_overrides, load_config
from .edgemap import build_downsampled_map, rasterize_segments, reconstruct_full_map
from .errors import AnnotationError, FrameSourceError, SeaHorizonError
from .evaluate import (
    compute_errors,
    load_annotations,
    read_results,
    summarize,
    write_annotations,
    write_results,
)
from .filters import FilterTrace, length_partition, roif, slope_filter
from .inference import TemporalState
from .lsd import detect_segments
from .pipeline import TIMING_KEYS, process_frame, process_stream
from .plots import draw_horizon_overlay, draw_segments_overlay, emit_plots, save_png
from .preprocess import Frame, downsample, extract_red
from .sources import load_frames, write_raw_video
from .synth import SyntheticSceneParams, TrajectoryParams, generate_sequence, params_from_mapping

EXIT_OK = 0
EXIT_IO = 1
EXIT_NO_DETECTION = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_CONFIG_FLAGS = [
    ("kappa", float, "downsampling factor in ]0, 1]"),
    ("grad_magnitude_threshold", float, "min gradient magnitude for segment growing"),
    ("angle_tolerance", float, "segment-growing angle tolerance (deg)"),
    ("min_region_size", int, "min region pixel count (default: auto from size)"),
    ("slope_threshold", float, "max |slope| kept by the slope filter"),
    ("n_confident", int, "size of the confident (longest) segment set"),
    ("n_doubtful", int, "size of the doubtful segment set"),
    ("distance_threshold", float, "max endpoint distance (px) in the ROI filter"),
    ("dy_th", float, "outlier gate on |Y - Y_prev| (px; default 5%% of height)"),
    ("dphi_th", float, "outlier gate on |phi - phi_prev| (deg)"),
    ("n_outs_th", int, "consecutive outliers before recovery"),
    ("m_top", int, "ranked Hough lines considered for substitution"),
    ("d_in", float, "inlier distance (px) for least-squares refinement"),
    ("edge_threshold", int, "binarization threshold on the upsampled edge map"),
]


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("detector configuration")
    group.add_argument("--config", metavar="TOML", help="config file with flat keys")
    for name, typ, help_text in _CONFIG_FLAGS:
        group.add_argument(
            "--" + name.replace("_", "-"), type=typ, default=None, dest=name, help=help_text
        )
    group.add_argument(
        "--debug-dump", action="store_true", default=None, dest="debug_dump",
        help="attach filter traces and edge maps to results",
    )


def _build_config(args) -> DetectorConfig:
    overrides = {
        name: getattr(args, name)
        for name, _, _ in _CONFIG_FLAGS
        if getattr(args, name) is not None
    }
    if args.debug_dump:
        overrides["debug_dump"] = True
    if args.config:
        return load_config(args.config, overrides)
    return config_with_overrides(overrides)


def _load_single_frame(path: str) -> Frame:
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            pixels = np.asarray(img, dtype=np.uint8)
        else:
            pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return Frame(pixels=pixels, frame_index=0)


def cmd_detect(args) -> int:
    config = _build_config(args)
    frame = _load_single_frame(args.image)
    result, _ = process_frame(frame, config, TemporalState())
    if result.line is None:
        print(f"{args.image}: no horizon detected", file=sys.stderr)
        return EXIT_NO_DETECTION
    print(f"Y={result.line.y:.2f} phi={result.line.phi:.3f}")
    if args.overlay:
        save_png(draw_horizon_overlay(frame.pixels, result.line), args.overlay)
    return EXIT_OK


def cmd_run(args) -> int:
    config = _build_config(args)
    state = TemporalState()
    if args.state_in:
        state = TemporalState.from_json(Path(args.state_in).read_text(encoding="utf-8"))
    results = []
    for result, state in _stream_with_state(args.source, config, state):
        results.append(result)
    if args.state_out:
        Path(args.state_out).write_text(state.to_json() + "\n", encoding="utf-8")
    video_id = args.video_id or Path(args.source).name or "stream"
    write_results(args.out, results, video_id, config.to_mapping())
    n_fail = sum(r.failure for r in results)
    totals = [r.timings_ms["total"] for r in results]
    mean_ms = statistics.fmean(totals) if totals else 0.0
    print(f"{len(results)} frames, {n_fail} failed, mean total {mean_ms:.1f} ms -> {args.out}")
    return EXIT_OK


def _stream_with_state(source: str, config: DetectorConfig, state: TemporalState):
    for frame in load_frames(source):
        result, state = process_frame(frame, config, state)
        yield result, state


def cmd_eval(args) -> int:
    video_id, _, results = read_results(args.results)
    annotations = load_annotations(args.annotations, left_edge_width=args.left_edge_width)
    errors = compute_errors(results, annotations)
    if not errors:
        print("no detected frames to evaluate", file=sys.stderr)
        return EXIT_NO_DETECTION
    times = [r.timings_ms.get("total", 0.0) for r in results if r.line is not None]
    summary = summarize(errors, times)
    paths = emit_plots(summary, errors, args.out)
    print(f"video {video_id}: {len(errors)} frames evaluated")
    print(f"{'metric':<8}{'y_err':>12}{'phi_err':>12}")
    for name in ("mu", "sigma", "q25", "q50", "q75", "q95"):
        yv = getattr(summary.y_err, name)
        pv = getattr(summary.phi_err, name)
        print(f"{name:<8}{yv:>12.4f}{pv:>12.4f}")
    print(f"mean_time_ms {summary.mean_time_ms:.2f}")
    print("wrote " + ", ".join(str(p) for p in paths))
    return EXIT_OK


def _bench_frames(args):
    if args.synthetic:
        size, _, count = args.synthetic.partition(":")
        w, _, h = size.partition("x")
        try:
            width, height, n = int(w), int(h), int(count or "10")
        except ValueError:
            raise FrameSourceError(f"bad --synthetic spec {args.synthetic!r}, expected WxH[:N]")
        scene = SyntheticSceneParams(
            width=width, height=height, y_gt=height * 0.5, horizon_contrast=60.0,
            wave_amplitude=6.0, glint_count=12, noise_sigma=2.0, seed=7,
        )
        return [frame for frame, _ in generate_sequence(scene, TrajectoryParams(n_frames=n))]
    return list(load_frames(args.source))


def cmd_bench(args) -> int:
    config = _build_config(args)
    frames = _bench_frames(args)
    if not frames:
        print("no frames to benchmark", file=sys.stderr)
        return EXIT_NO_DETECTION

    # one untimed pass so jit compilation does not pollute the report
    process_frame(frames[0], config, TemporalState())

    per_stage: dict[str, list[float]] = {k: [] for k in TIMING_KEYS}
    if args.parallel_streams > 1:
        from concurrent.futures import ProcessPoolExecutor

        t0 = time.perf_counter()
        with ProcessPoolExecutor(max_workers=args.parallel_streams) as pool:
            futures = [
                pool.submit(_bench_one_stream, frames, config)
                for _ in range(args.repetitions * args.parallel_streams)
            ]
            for fut in futures:
                for key, vals in fut.result().items():
                    per_stage[key].extend(vals)
        wall = time.perf_counter() - t0
    else:
        t0 = time.perf_counter()
        for _ in range(args.repetitions):
            for key, vals in _bench_one_stream(frames, config).items():
                per_stage[key].extend(vals)
        wall = time.perf_counter() - t0

    n = len(per_stage["total"])
    print(f"{n} frames timed ({len(frames)} frames x {args.repetitions} repetitions"
          + (f" x {args.parallel_streams} streams" if args.parallel_streams > 1 else "") + ")")
    print(f"{'stage':<12}{'mean ms':>10}{'sigma ms':>10}")
    for key in TIMING_KEYS:
        vals = per_stage[key]
        mean = statistics.fmean(vals) if vals else 0.0
        sigma = statistics.pstdev(vals) if vals else 0.0
        print(f"{key:<12}{mean:>10.2f}{sigma:>10.2f}")
    fps = n / wall if wall > 0 else 0.0
    print(f"wall time {wall:.2f} s, {fps:.1f} frames/s")
    return EXIT_OK


def _bench_one_stream(frames, config) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {k: [] for k in TIMING_KEYS}
    for result in process_stream(frames, config):
        for key in TIMING_KEYS:
            if key in result.timings_ms:
                out[key].append(result.timings_ms[key])
    return out


def cmd_debug_dump(args) -> int:
    config = _build_config(args)
    frame = _load_single_frame(args.image)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    red = extract_red(frame.pixels)
    small = downsample(red, config.kappa)
    segs = detect_segments(small, config.lsd)
    flat = slope_filter(segs, config.lsf)
    confident, doubtful = length_partition(flat, config.lsf)
    kept, mask = roif(confident, doubtful, config.roif)
    trace = FilterTrace(
        n_raw=len(segs),
        n_slope_kept=len(flat),
        n_confident=len(confident),
        n_doubtful=len(doubtful),
        n_doubtful_kept=len(kept),
        doubtful_keep_mask=mask,
    )

    from .pipeline import _merge

    final = _merge(confident, kept)
    coords = rasterize_segments(final, small.shape[1], small.shape[0])
    eprime = build_downsampled_map(coords, small.shape[1], small.shape[0])
    emap = reconstruct_full_map(eprime, config.kappa, (frame.height, frame.width),
                                config.edge_threshold)

    save_png(draw_segments_overlay(small, segs), out / "segments_all.png")
    save_png(draw_segments_overlay(small, confident, (64, 220, 64)), out / "segments_confident.png")
    save_png(draw_segments_overlay(small, doubtful, (240, 200, 40)), out / "segments_doubtful.png")
    save_png(draw_segments_overlay(small, kept, (80, 160, 255)), out / "segments_rescued.png")
    save_png(draw_segments_overlay(small, final), out / "segments_final.png")
    eprime.to_png(out / "edge_map_small.png")
    emap.to_png(out / "edge_map_full.png")
    (out / "trace.json").write_text(trace.to_json() + "\n", encoding="utf-8")
    print(f"wrote 7 images + trace.json to {out}")
    return EXIT_OK


_SYNTH_FLAG_KEYS = (
    "width", "height", "n_frames", "y_gt", "phi_gt", "seed", "horizon_contrast",
    "noise_sigma", "wave_amplitude", "glint_count", "y_amplitude", "phi_amplitude",
)


def cmd_synth(args) -> int:
    mapping: dict = {}
    if args.params:
        with open(args.params, "rb") as fh:
            mapping = tomllib.load(fh)
    for name in _SYNTH_FLAG_KEYS:
        value = getattr(args, name)
        if value is not None:
            mapping[name] = value
    scene, traj = params_from_mapping(mapping)

    out = Path(args.out)
    annotations = []
    if out.suffix == ".hrzn":
        def pixel_iter():
            for frame, ann in generate_sequence(scene, traj):
                annotations.append(ann)
                yield frame.pixels

        with open(out, "wb") as fh:
            write_raw_video(fh, pixel_iter(), scene.width, scene.height, traj.n_frames)
        ann_path = Path(args.annotations) if args.annotations else out.with_suffix(".csv")
    else:
        out.mkdir(parents=True, exist_ok=True)
        for frame, ann in generate_sequence(scene, traj):
            save_png(frame.pixels, out / f"{frame.frame_index:04d}.png")
            annotations.append(ann)
        ann_path = Path(args.annotations) if args.annotations else out / "annotations.csv"
    write_annotations(ann_path, annotations)
    print(f"wrote {traj.n_frames} frames and {ann_path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _Parser(prog="seahorizon", description="Real-time sea-horizon detection")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("detect", help="detect the horizon on one image",
                       description="Detect the horizon on a single image.")
    p.add_argument("image", help="input image (PNG/JPEG)")
    p.add_argument("--overlay", metavar="PNG", help="write the image with the line drawn")
    _add_config_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("run", help="process a frame stream into results JSON")
    p.add_argument("source", help="image directory, raw video file, or - for stdin")
    p.add_argument("--out", required=True, metavar="JSON", help="results output path")
    p.add_argument("--video-id", help="identifier stored in the results document")
    p.add_argument("--state-in", metavar="JSON", help="resume from a saved temporal state")
    p.add_argument("--state-out", metavar="JSON", help="save the final temporal state")
    _add_config_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="compute metric table and charts from results")
    p.add_argument("results", help="results JSON from the run command")
    p.add_argument("annotations", help="ground-truth CSV (frame_index,y_gt_px,phi_gt_deg)")
    p.add_argument("--out", default="eval_out", help="output directory for charts and table")
    p.add_argument("--left-edge-width", type=int, default=None, metavar="W",
                   help="annotations give Y at the left edge of a W-px-wide image")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="per-stage timing report")
    p.add_argument("--source", help="frame source (directory, raw file, or -)")
    p.add_argument("--synthetic", metavar="WxH[:N]", help="generate N synthetic frames instead")
    p.add_argument("--repetitions", type=int, default=1, help="process the stream this many times")
    p.add_argument("--parallel-streams", type=int, default=1,
                   help="run this many independent copies concurrently")
    _add_config_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("debug-dump", help="write intermediate artifacts for one image")
    p.add_argument("image", help="input image (PNG/JPEG)")
    p.add_argument("--out", required=True, help="output directory")
    _add_config_args(p)
    p.set_defaults(func=cmd_debug_dump)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--params", metavar="TOML", help="scene + trajectory parameter file")
    p.add_argument("--out", required=True, help="output directory (PNG frames) or .hrzn file")
    p.add_argument("--annotations", metavar="CSV",
                   help="annotation output path (default: alongside frames)")
    for name, typ in [("width", int), ("height", int), ("n_frames", int), ("y_gt", float),
                      ("phi_gt", float), ("seed", int), ("horizon_contrast", float),
                      ("noise_sigma", float), ("wave_amplitude", float), ("glint_count", int),
                      ("y_amplitude", float), ("phi_amplitude", float)]:
        p.add_argument("--" + name.replace("_", "-"), type=typ, default=None, dest=name)
    p.set_defaults(func=cmd_synth)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FrameSourceError, AnnotationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SeaHorizonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DETECTION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
