# tests/performance/test_acceptance.py
# Long oracle-calibrated experiments; run with `pytest -m slow`.
from __future__ import annotations

import pytest

from services.field_core import Scheme
from services.lab import (
    CounterexampleConfig,
    ExperimentConfig,
    consistency_experiment,
    copy_left_spec,
    counterexample_experiment,
    diagonal_switch_spec,
)

pytestmark = pytest.mark.slow

LADDER = [32, 64, 128, 256]


def test_corner_window_law_converges_along_ladder():
    config = ExperimentConfig.from_settings(replicates=20, rng_seed=2024, n_jobs=-1)
    report = consistency_experiment(copy_left_spec(), Scheme.CORNER, LADDER, config=config)
    assert report.summary["strictly_decreasing"], report.summary["sizes"]
    assert report.summary["within_noise_floor"], report.summary["sizes"][-1]


def test_spiral_breaks_conditional_dependence():
    spec = diagonal_switch_spec()
    config = CounterexampleConfig.from_settings(rng_seed=2024, n_jobs=-1)
    summary = counterexample_experiment(spec, config).summary
    assert summary["cmi_true"] > 0.01
    assert summary["cmi_collapsed"], summary
    assert summary["v_exceeds_q"], summary


def test_spiral_small_window_still_converges():
    config = ExperimentConfig.from_settings(replicates=20, rng_seed=2024, n_jobs=-1)
    report = consistency_experiment(diagonal_switch_spec(), Scheme.SPIRAL, LADDER, config=config)
    assert report.summary["strictly_decreasing"], report.summary["sizes"]
