"""Horizon inference on the binary edge map.

Three stages: a rho-theta Hough vote restricted to near-horizontal angles,
a temporal gate that rejects per-frame outliers against the previous
detection (with substitution from lower-ranked lines and a failure-recovery
reset), and a least-squares refinement over the edge pixels close to the
gated line.

Conventions: y grows downward; tilt phi is in degrees, positive
counter-clockwise, so a line y = alpha*x + beta has phi = -atan(alpha).
Y is the line's height at the central column x_c = (width-1)/2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .edgemap import EdgeMap
from .errors import NoEdgesError
from .preprocess import round_half_away

THETA_RES_DEG = 0.25
RHO_RES = 1.0
THETA_MARGIN_DEG = 5.0


@dataclass(frozen=True)
class HorizonLine:
    """Horizon position: height Y (px) at the central column, tilt phi (deg)."""

    y: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "phi", float(self.phi))
        if not abs(self.phi) < 90.0:
            raise ValueError("phi must satisfy |phi| < 90 degrees")

    def slope(self) -> float:
        return -math.tan(math.radians(self.phi))

    def alpha_beta(self, width: int) -> tuple[float, float]:
        """(alpha, beta) of y = alpha*x + beta on an image of this width."""
        alpha = self.slope()
        return alpha, self.y - alpha * (width - 1) / 2.0


@dataclass
class TemporalState:
    """Per-stream temporal memory for the outlier gate.

    prev is the last trusted (coarse) line; n_outs counts consecutive
    rank-1 outliers; in_failure marks that the counter just overflowed and
    a recovery reset happened on this frame.
    """

    prev: HorizonLine | None = None
    n_outs: int = 0
    in_failure: bool = False

    def to_json(self) -> str:
        prev = None if self.prev is None else {"y": self.prev.y, "phi": self.prev.phi}
        return json.dumps({"prev": prev, "n_outs": self.n_outs, "in_failure": self.in_failure})

    @classmethod
    def from_json(cls, text: str) -> "TemporalState":
        data = json.loads(text)
        prev = data.get("prev")
        return cls(
            prev=None if prev is None else HorizonLine(float(prev["y"]), float(prev["phi"])),
            n_outs=int(data.get("n_outs", 0)),
            in_failure=bool(data.get("in_failure", False)),
        )


@dataclass
class OhmParams:
    """Temporal-gate thresholds.

    dy_th: max |Y - Y_prev| (px) for a non-outlier; None means 5% of the
        frame height, resolved once the frame size is known.
    dphi_th: max |phi - phi_prev| (deg) for a non-outlier.
    n_outs_th: consecutive outliers tolerated before recovery.
    m_top: how many ranked Hough lines to consider for substitution.
    d_in: inlier distance (px) for least-squares refinement.
    """

    dy_th: float | None = None
    dphi_th: float = 1.5
    n_outs_th: int = 10
    m_top: int = 10
    d_in: float = 2.0

    def __post_init__(self):
        for name in ("dy_th", "dphi_th", "n_outs_th", "m_top", "d_in"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")

    def resolved(self, frame_height: int) -> "OhmParams":
        """Concrete params for a given frame height (fills the auto dy_th)."""
        if self.dy_th is not None:
            return self
        return OhmParams(
            dy_th=0.05 * frame_height,
            dphi_th=self.dphi_th,
            n_outs_th=self.n_outs_th,
            m_top=self.m_top,
            d_in=self.d_in,
        )


def hough_top_lines(
    emap: EdgeMap,
    m_top: int,
    slope_threshold: float,
    theta_margin_deg: float = THETA_MARGIN_DEG,
) -> list[tuple[HorizonLine, int]]:
    """Top near-horizontal lines of a binary edge map by Hough votes.

    The accumulator spans theta = 90 deg +- (atan(slope_threshold) + margin)
    at 0.25 deg steps and rho at 1 px steps. Returns up to m_top local
    maxima as (line, votes), sorted by votes descending, ties broken by
    (theta, rho) ascending. Raises NoEdgesError on an empty map.
    """
    xs, ys = emap.edge_points()
    if xs.size == 0:
        raise NoEdgesError("edge map contains no edge pixels")

    phi_span = math.degrees(math.atan(slope_threshold)) + theta_margin_deg
    n_steps = int(math.ceil(phi_span / THETA_RES_DEG))
    thetas_deg = 90.0 + np.arange(-n_steps, n_steps + 1) * THETA_RES_DEG
    thetas = np.radians(thetas_deg)
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)

    w = emap.width
    h = emap.height
    rho_min = math.floor(min(0.0, (w - 1) * float(cos_t.min())))
    rho_max = math.ceil((h - 1) * float(sin_t.max()) + (w - 1) * max(float(cos_t.max()), 0.0))
    n_rho = int(round((rho_max - rho_min) / RHO_RES)) + 1

    xf = xs.astype(np.float64)
    yf = ys.astype(np.float64)
    acc = np.empty((thetas.size, n_rho), dtype=np.int64)
    for i in range(thetas.size):
        rho = xf * cos_t[i] + yf * sin_t[i]
        idx = round_half_away((rho - rho_min) / RHO_RES).astype(np.intp)
        acc[i] = np.bincount(idx, minlength=n_rho)

    # local maxima; on plateaus only the first cell in (theta, rho) order
    # wins: strictly above the already-visited half of the 3x3 ring.
    pad = np.zeros((acc.shape[0] + 2, acc.shape[1] + 2), dtype=np.int64)
    pad[1:-1, 1:-1] = acc
    is_peak = (
        (acc >= 1)
        & (acc > pad[:-2, :-2])
        & (acc > pad[:-2, 1:-1])
        & (acc > pad[:-2, 2:])
        & (acc > pad[1:-1, :-2])
        & (acc >= pad[1:-1, 2:])
        & (acc >= pad[2:, :-2])
        & (acc >= pad[2:, 1:-1])
        & (acc >= pad[2:, 2:])
    )
    ti, ri = np.nonzero(is_peak)
    votes = acc[ti, ri]
    order = np.lexsort((ri, ti, -votes))[:m_top]

    xc = (w - 1) / 2.0
    out: list[tuple[HorizonLine, int]] = []
    for k in order:
        theta = thetas[ti[k]]
        rho = rho_min + ri[k] * RHO_RES
        y_at_center = (rho - xc * math.cos(theta)) / math.sin(theta)
        phi = 90.0 - thetas_deg[ti[k]]
        out.append((HorizonLine(float(y_at_center), float(phi)), int(votes[k])))
    return out


def _is_outlier(line: HorizonLine, prev: HorizonLine, params: OhmParams) -> bool:
    return abs(line.y - prev.y) > params.dy_th or abs(line.phi - prev.phi) > params.dphi_th


def ohm_select(
    top_lines: list[tuple[HorizonLine, int]],
    state: TemporalState,
    params: OhmParams,
) -> tuple[HorizonLine, TemporalState]:
    """Gate the ranked Hough lines against the previous detection.

    First frame: rank-1 is trusted. Otherwise a rank-1 within the Y/phi
    thresholds of prev resets the outlier counter; a rank-1 outside them
    bumps the counter and the best in-threshold substitute (minimum
    |Y - Y_prev| among the ranked lines) is used instead. With no
    substitute the rank-1 is emitted but prev is kept. Once the counter
    passes its threshold the gate gives up and re-seeds from rank-1.

    Returns the selected coarse line and the successor state; the input
    state is not mutated.
    """
    if not top_lines:
        raise ValueError("top_lines must be non-empty")
    if params.dy_th is None:
        raise ValueError("dy_th must be resolved before gating (see OhmParams.resolved)")
    rank1 = top_lines[0][0]

    if state.prev is None:
        return rank1, TemporalState(prev=rank1, n_outs=0, in_failure=False)

    if not _is_outlier(rank1, state.prev, params):
        return rank1, TemporalState(prev=rank1, n_outs=0, in_failure=False)

    n_outs = state.n_outs + 1
    if n_outs > params.n_outs_th:
        # failure recovery: trust the strongest line again
        return rank1, TemporalState(prev=rank1, n_outs=0, in_failure=True)

    best: HorizonLine | None = None
    best_dy = math.inf
    for line, _ in top_lines[: params.m_top]:
        if _is_outlier(line, state.prev, params):
            continue
        dy = abs(line.y - state.prev.y)
        if dy < best_dy:
            best = line
            best_dy = dy
    if best is not None:
        return best, TemporalState(prev=best, n_outs=n_outs, in_failure=False)
    return rank1, TemporalState(prev=state.prev, n_outs=n_outs, in_failure=False)


def refine_least_squares(coarse: HorizonLine, emap: EdgeMap, d_in: float) -> HorizonLine:
    """Least-squares fit (y on x) over edge pixels near the coarse line.

    Inliers lie within normal distance d_in of the coarse line. Fewer than
    2 inliers, or an inlier x-spread under 2 px, returns coarse unchanged.
    """
    xs, ys = emap.edge_points()
    if xs.size == 0:
        return coarse
    alpha, beta = coarse.alpha_beta(emap.width)
    dist = np.abs(alpha * xs + beta - ys) / math.sqrt(1.0 + alpha * alpha)
    sel = dist <= d_in
    xi = xs[sel].astype(np.float64)
    yi = ys[sel].astype(np.float64)
    if xi.size < 2 or xi.max() - xi.min() < 2.0:
        return coarse
    xm = xi.mean()
    ym = yi.mean()
    dx = xi - xm
    slope = float(dx @ (yi - ym)) / float(dx @ dx)
    intercept = ym - slope * xm
    xc = (emap.width - 1) / 2.0
    return HorizonLine(slope * xc + intercept, -math.degrees(math.atan(slope)))
