# tests/unit/test_settings.py
from __future__ import annotations

import pytest

from services.errors import ConfigError
from services.lab.cdf import CdfGrid
from services.resampler import build_config
from services.settings import get_settings


def test_repo_config_defaults():
    s = get_settings()
    assert s.synthesis.epsilon == 0.1
    assert s.synthesis.bandwidth == 0.01
    assert s.lab.sizes == (32, 64, 128, 256)
    assert s.lab.oracle_depth == 12
    assert s.runtime.n_jobs == 1


def test_missing_file_uses_builtin_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("FIELDBOOT_CONFIG", str(tmp_path / "absent.yml"))
    s = get_settings()
    assert s.lab.replicates == 20
    assert s.synthesis.sweep_bandwidths == (0.007, 0.01, 0.1, 1.0)


def test_yaml_values_and_env_overrides(tmp_path, monkeypatch):
    cfg = tmp_path / "custom.yml"
    cfg.write_text("lab:\n  replicates: 7\nruntime:\n  n_jobs: 3\n")
    monkeypatch.setenv("FIELDBOOT_CONFIG", str(cfg))
    assert get_settings().lab.replicates == 7
    assert get_settings().runtime.n_jobs == 3
    monkeypatch.setenv("FIELDBOOT_JOBS", "5")
    monkeypatch.setenv("FIELDBOOT_LOG_LEVEL", "debug")
    s = get_settings()
    assert s.runtime.n_jobs == 5
    assert s.runtime.log_level == "DEBUG"
    assert s.runtime.log_path.endswith("runs.jsonl")


def test_bad_env_value_falls_back(monkeypatch):
    monkeypatch.setenv("FIELDBOOT_JOBS", "many")
    assert get_settings().runtime.n_jobs == 1


def test_invalid_yaml_values_raise(tmp_path, monkeypatch):
    cfg = tmp_path / "broken.yml"
    cfg.write_text("synthesis:\n  bandwidth: -1\n")
    monkeypatch.setenv("FIELDBOOT_CONFIG", str(cfg))
    with pytest.raises(ConfigError, match="invalid settings"):
        get_settings()


def test_yaml_tunes_spatial_sigma_and_cdf_grid(tmp_path, monkeypatch):
    uniform = {"kind": "uniform", "epsilon": 0.1}
    cfg = build_config(scheme="corner", w=3, mode=uniform, out_height=4, out_width=4)
    assert cfg.spatial_sigma() == pytest.approx(5 / 6.4)
    assert CdfGrid.continuous(1).points == 9

    custom = tmp_path / "tuned.yml"
    custom.write_text(
        "synthesis:\n  spatial_sigma_divisor: 1.0\n"
        "lab:\n  continuous_grid_points: 3\n  max_grid_points: 20\n"
    )
    monkeypatch.setenv("FIELDBOOT_CONFIG", str(custom))
    assert cfg.spatial_sigma() == pytest.approx(5.0)
    assert CdfGrid.continuous(1).points == 3
    # 3**3 exceeds the cap, so the axis thins to 2 points
    assert CdfGrid.continuous(3).points == 2
