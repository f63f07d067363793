"""Detector configuration: defaults, TOML files, and flat-key overrides."""

import pytest

from seahorizon.config import DetectorConfig, config_with_overrides, load_config


def test_defaults():
    cfg = DetectorConfig()
    assert cfg.kappa == 0.5
    assert cfg.edge_threshold == 254
    assert cfg.lsd.grad_magnitude_threshold == 2.0
    assert cfg.lsd.angle_tolerance == 22.5
    assert cfg.lsd.min_region_size is None
    assert cfg.lsf.slope_threshold == 0.6
    assert cfg.lsf.n_confident == 15
    assert cfg.lsf.n_doubtful == 150
    assert cfg.roif.distance_threshold == 2.0
    assert cfg.ohm.dy_th is None  # resolved per-frame to 5% of height
    assert cfg.ohm.dphi_th == 1.5
    assert cfg.ohm.n_outs_th == 10
    assert cfg.ohm.m_top == 10
    assert cfg.ohm.d_in == 2.0
    assert cfg.debug_dump is False


def test_toml_file(tmp_path):
    path = tmp_path / "conf.toml"
    path.write_text(
        'kappa = 0.25\nn_confident = 7\ndy_th = 18.5\ndebug_dump = true\n',
        encoding="utf-8",
    )
    cfg = load_config(path)
    assert cfg.kappa == 0.25
    assert cfg.lsf.n_confident == 7
    assert cfg.ohm.dy_th == 18.5
    assert cfg.debug_dump is True
    # untouched keys keep defaults
    assert cfg.lsf.n_doubtful == 150


def test_overrides_beat_file(tmp_path):
    path = tmp_path / "conf.toml"
    path.write_text("kappa = 0.25\n", encoding="utf-8")
    cfg = load_config(path, overrides={"kappa": 0.75})
    assert cfg.kappa == 0.75


def test_overrides_without_file():
    cfg = config_with_overrides({"slope_threshold": 0.3, "edge_threshold": 200})
    assert cfg.lsf.slope_threshold == 0.3
    assert cfg.edge_threshold == 200


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "conf.toml"
    path.write_text("kappa_scale = 0.5\n", encoding="utf-8")
    with pytest.raises(ValueError, match="kappa_scale"):
        load_config(path)


def test_bounds_validation():
    with pytest.raises(ValueError):
        config_with_overrides({"kappa": 0.0})
    with pytest.raises(ValueError):
        config_with_overrides({"kappa": 1.5})
    with pytest.raises(ValueError):
        config_with_overrides({"edge_threshold": 300})
    with pytest.raises(ValueError):
        config_with_overrides({"n_confident": 0})


def test_mapping_round_trip():
    cfg = config_with_overrides({"kappa": 0.4, "dy_th": 25.0, "m_top": 5})
    back = config_with_overrides(cfg.to_mapping())
    assert back == cfg
