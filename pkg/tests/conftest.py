# tests/conftest.py
from __future__ import annotations

import pathlib
import sys

import numpy as np
import pytest

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))


@pytest.fixture(autouse=True)
def _isolated_runtime(tmp_path, monkeypatch):
    # run records go to a per-test file; the repo config is used whatever the cwd
    monkeypatch.setenv("FIELDBOOT_LOG", str(tmp_path / "runs.jsonl"))
    monkeypatch.setenv("FIELDBOOT_CONFIG", str(ROOT / "configs" / "fieldboot.yml"))
    monkeypatch.delenv("FIELDBOOT_JOBS", raising=False)
    monkeypatch.delenv("FIELDBOOT_LOG_LEVEL", raising=False)


@pytest.fixture
def checker():
    """8x8 two-level checkerboard with a 2x2 period."""
    rows, cols = np.indices((8, 8))
    return ((rows + cols) % 2).astype(np.float64)


@pytest.fixture
def noise_image():
    rng = np.random.default_rng(7)
    return rng.integers(0, 4, size=(12, 12)).astype(np.float64) / 3.0
