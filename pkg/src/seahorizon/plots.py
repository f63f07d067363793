"""Rendering: error-distribution charts, metric tables, image overlays."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .evaluate import ErrorRecord, MetricStats, MetricSummary
from .geometry import SegmentSet
from .inference import HorizonLine

METRIC_ROWS = ("mu", "sigma", "q25", "q50", "q75", "q95")


def _hist_svg(values: np.ndarray, title: str, xlabel: str, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    bins = min(30, max(5, int(math.sqrt(values.size) * 2)))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=bins, color="#33658a", edgecolor="white")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("frames")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _metric_values(stats: MetricStats) -> list[float]:
    return [stats.mu, stats.sigma, stats.q25, stats.q50, stats.q75, stats.q95]


def emit_plots(summary: MetricSummary, errors: list[ErrorRecord], out_dir) -> list[Path]:
    """Write two error histograms (SVG) and the metric table (CSV).

    Returns the created file paths: y_err_hist.svg, phi_err_hist.svg,
    metrics.csv.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    y = np.array([e.y_err for e in errors], dtype=np.float64)
    phi = np.array([e.phi_err for e in errors], dtype=np.float64)

    y_path = out / "y_err_hist.svg"
    phi_path = out / "phi_err_hist.svg"
    csv_path = out / "metrics.csv"
    _hist_svg(y, "Horizon position error", "|Y error| (px)", y_path)
    _hist_svg(phi, "Horizon tilt error", "|phi error| (deg)", phi_path)

    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "y_err", "phi_err"])
        y_vals = _metric_values(summary.y_err)
        phi_vals = _metric_values(summary.phi_err)
        for name, yv, pv in zip(METRIC_ROWS, y_vals, phi_vals):
            writer.writerow([name, repr(yv), repr(pv)])
    return [y_path, phi_path, csv_path]


def _as_rgb(pixels: np.ndarray) -> np.ndarray:
    if pixels.ndim == 2:
        return np.repeat(pixels[:, :, None], 3, axis=2).copy()
    return pixels.copy()


def draw_horizon_overlay(pixels: np.ndarray, line: HorizonLine) -> np.ndarray:
    """Input image with the detected line drawn across its full width."""
    from PIL import Image, ImageDraw

    rgb = _as_rgb(pixels)
    h, w = rgb.shape[:2]
    alpha, beta = line.alpha_beta(w)
    img = Image.fromarray(rgb, mode="RGB")
    draw = ImageDraw.Draw(img)
    draw.line((0, beta, w - 1, alpha * (w - 1) + beta), fill=(255, 48, 48), width=2)
    return np.asarray(img)


def draw_segments_overlay(
    pixels: np.ndarray, segs: SegmentSet, color: tuple[int, int, int] = (255, 48, 48)
) -> np.ndarray:
    """Image with every segment of the set drawn on top."""
    from PIL import Image, ImageDraw

    img = Image.fromarray(_as_rgb(pixels), mode="RGB")
    draw = ImageDraw.Draw(img)
    for i in range(len(segs)):
        draw.line((segs.xs[i], segs.ys[i], segs.xe[i], segs.ye[i]), fill=color, width=1)
    return np.asarray(img)


def save_png(pixels: np.ndarray, path) -> None:
    from PIL import Image

    mode = "L" if pixels.ndim == 2 else "RGB"
    Image.fromarray(pixels.astype(np.uint8), mode=mode).save(path, format="PNG")
