"""Detector configuration: defaults, TOML loading, flat-key overrides.

The on-disk format is a flat TOML table, one key per tunable, matching the
CLI flag names one-to-one. Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .edgemap import EDGE_THRESHOLD_DEFAULT
from .filters import LsfParams, RoifParams
from .inference import OhmParams
from .lsd import LsdParams


@dataclass
class DetectorConfig:
    """Every knob of the per-frame pipeline, grouped by stage."""

    kappa: float = 0.5
    lsd: LsdParams = field(default_factory=LsdParams)
    lsf: LsfParams = field(default_factory=LsfParams)
    roif: RoifParams = field(default_factory=RoifParams)
    ohm: OhmParams = field(default_factory=OhmParams)
    edge_threshold: int = EDGE_THRESHOLD_DEFAULT
    debug_dump: bool = False

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError("kappa must be in ]0, 1]")
        if not 0 <= self.edge_threshold <= 255:
            raise ValueError("edge_threshold must be in [0, 255]")

    def to_mapping(self) -> dict[str, Any]:
        """Flat key/value view (the config-file format), for echoing."""
        return {
            "kappa": self.kappa,
            "grad_magnitude_threshold": self.lsd.grad_magnitude_threshold,
            "angle_tolerance": self.lsd.angle_tolerance,
            "min_region_size": self.lsd.min_region_size,
            "slope_threshold": self.lsf.slope_threshold,
            "n_confident": self.lsf.n_confident,
            "n_doubtful": self.lsf.n_doubtful,
            "distance_threshold": self.roif.distance_threshold,
            "dy_th": self.ohm.dy_th,
            "dphi_th": self.ohm.dphi_th,
            "n_outs_th": self.ohm.n_outs_th,
            "m_top": self.ohm.m_top,
            "d_in": self.ohm.d_in,
            "edge_threshold": self.edge_threshold,
            "debug_dump": self.debug_dump,
        }

    @classmethod
    def from_mapping(cls, mapping: dict[str, Any]) -> "DetectorConfig":
        """Build from flat keys; unknown keys raise ValueError."""
        base = cls().to_mapping()
        unknown = sorted(set(mapping) - set(base))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        m = {**base, **mapping}
        return cls(
            kappa=float(m["kappa"]),
            lsd=LsdParams(
                grad_magnitude_threshold=float(m["grad_magnitude_threshold"]),
                angle_tolerance=float(m["angle_tolerance"]),
                min_region_size=None if m["min_region_size"] is None else int(m["min_region_size"]),
            ),
            lsf=LsfParams(
                slope_threshold=float(m["slope_threshold"]),
                n_confident=int(m["n_confident"]),
                n_doubtful=int(m["n_doubtful"]),
            ),
            roif=RoifParams(distance_threshold=float(m["distance_threshold"])),
            ohm=OhmParams(
                dy_th=None if m["dy_th"] is None else float(m["dy_th"]),
                dphi_th=float(m["dphi_th"]),
                n_outs_th=int(m["n_outs_th"]),
                m_top=int(m["m_top"]),
                d_in=float(m["d_in"]),
            ),
            edge_threshold=int(m["edge_threshold"]),
            debug_dump=bool(m["debug_dump"]),
        )


def load_config(path, overrides: dict[str, Any] | None = None) -> DetectorConfig:
    """Read a flat TOML config file and apply overrides on top."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    if overrides:
        data.update(overrides)
    return DetectorConfig.from_mapping(data)


def config_with_overrides(overrides: dict[str, Any]) -> DetectorConfig:
    """Defaults plus overrides, without a file."""
    return DetectorConfig.from_mapping(overrides)
