# tests/unit/test_resampler.py
from __future__ import annotations

import logging

import numpy as np
import pytest
from scipy.special import softmax
from scipy.stats import chisquare

from services.errors import ConfigError, EmptyCandidateSetError, PreconditionError
from services.field_core import Field, LatticePoint, Scheme
from services.field_core.patches import CandidateGrid, extract_vector
from services.field_core.shapes import neighborhood_shape
from services.resampler import (
    SynthesisConfig,
    bandwidth_sweep,
    build_config,
    place_seed,
    scheme_ordering,
    synthesize,
    synthesize_pixel,
    synthesize_with_report,
)
from services.resampler.engine import distinct_window_fraction
from services.resampler.rng import seed_stream, stream
from services.weighting import log_weight, patch_distance
from services.weighting.matching import epsilon_match_set


def _config(scheme="corner", w=2, mode=None, h=6, width=6, **extra) -> SynthesisConfig:
    return build_config(
        scheme=scheme,
        w=w,
        mode=mode or {"kind": "kernel", "b": 0.1},
        out_height=h,
        out_width=width,
        **extra,
    )


def test_config_validation():
    with pytest.raises(ConfigError):
        _config(w=1)
    with pytest.raises(ConfigError):
        _config(scheme="spiral", w=3, h=4, width=4)
    with pytest.raises(ConfigError):
        _config(mode={"kind": "kernel", "b": -1.0})
    cfg = _config(scheme="spiral", w=3, h=5, width=5)
    assert cfg.side == 5
    assert _config(w=3, seed_side=2).side == 2


def test_spiral_ordering_first_ring():
    cfg = _config(scheme="spiral", h=3, width=3, seed_side=1)
    pts = list(scheme_ordering(cfg))
    assert pts == [(2, 1), (2, 0), (1, 0), (0, 0), (0, 1), (0, 2), (1, 2), (2, 2)]


def test_raster_ordering_after_seed():
    cfg = _config(h=2, width=3)
    assert list(scheme_ordering(cfg)) == [(0, 2), (1, 2)]


@pytest.mark.parametrize("scheme", ["corner", "rectangular", "spiral"])
@pytest.mark.parametrize("dims", [(7, 7), (6, 9), (10, 5)])
def test_ordering_partitions_canvas(scheme, dims):
    cfg = _config(scheme=scheme, h=dims[0], width=dims[1])
    pts = list(scheme_ordering(cfg))
    assert len(set(pts)) == len(pts)
    assert len(pts) + cfg.side**2 == dims[0] * dims[1]
    seed = cfg.canvas().seed_mask()
    assert not any(seed[p.row, p.col] for p in pts)


def test_place_seed_copies_block(noise_image):
    observed = Field.filled(noise_image)
    cfg = _config(scheme="spiral", h=9, width=9)
    state = place_seed(observed, cfg, seed_stream(5))
    top, left = state.seed_origin
    np.testing.assert_array_equal(
        state.canvas.values[3:6, 3:6], observed.values[top : top + 3, left : left + 3]
    )
    assert state.canvas.mask.sum() == 9
    again = place_seed(observed, cfg, seed_stream(5))
    assert again.seed_origin == state.seed_origin


def test_place_seed_whole_image_when_exact():
    observed = Field.filled([[0.1, 0.2], [0.3, 0.4]])
    state = place_seed(observed, _config(), seed_stream(0))
    assert state.seed_origin == (0, 0)
    np.testing.assert_array_equal(state.canvas.values[:2, :2], observed.values)


def test_place_seed_uniform_over_positions():
    observed = Field.filled(np.zeros((5, 5)))
    cfg = _config()
    counts = np.zeros(16)
    for i in range(10_000):
        top, left = place_seed(observed, cfg, stream(11, 0, i)).seed_origin
        counts[top * 4 + left] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_place_seed_rejects_small_observed():
    with pytest.raises(PreconditionError):
        place_seed(Field.filled([[0.5]]), _config(), seed_stream(0))


def test_constant_field_returns_constant():
    observed = Field.filled(np.full((6, 6), 0.4))
    for mode in ({"kind": "kernel", "b": 0.01}, {"kind": "uniform", "epsilon": 0.1}):
        out = synthesize(observed, _config(scheme="spiral", mode=mode, h=7, width=7))
        assert np.all(out.values == 0.4)


def test_out_dims_equal_seed_dims_returns_seed(noise_image):
    observed = Field.filled(noise_image)
    cfg = _config(h=2, width=2, rng_seed=3)
    out = synthesize(observed, cfg)
    state = place_seed(observed, cfg, seed_stream(3))
    np.testing.assert_array_equal(out.values, state.canvas.values)


def test_empty_candidate_set():
    observed = Field.filled([[0.0, 1.0], [1.0, 0.0]])
    cfg = _config(w=3, seed_side=2, h=2, width=4)
    with pytest.raises(EmptyCandidateSetError, match="smaller than conditioning shape"):
        synthesize(observed, cfg)


def test_closure_over_randomized_runs():
    rng = np.random.default_rng(2024)
    modes = [{"kind": "kernel", "b": 0.05}, {"kind": "uniform", "epsilon": 0.1}]
    for run in range(54):
        scheme = ("corner", "rectangular", "spiral")[run % 3]
        w = 2 + (run % 2)
        k = int(rng.integers(2, 6))
        observed = Field.filled(rng.integers(0, k, size=(12, 12)) / (k - 1))
        cfg = _config(
            scheme=scheme, w=w, mode=modes[(run // 3) % 2], h=9, width=10, rng_seed=run
        )
        out = synthesize(observed, cfg)
        assert out.is_complete
        assert np.isin(out.value_multiset(), observed.value_multiset()).all()


def test_determinism(noise_image):
    observed = Field.filled(noise_image)
    cfg = _config(scheme="spiral", h=11, width=9, rng_seed=77)
    a = synthesize(observed, cfg)
    b = synthesize(observed, cfg)
    assert a.values.tobytes() == b.values.tobytes()
    c = synthesize(observed, cfg.model_copy(update={"rng_seed": 78}))
    assert c.values.tobytes() != a.values.tobytes()


def _two_symbol_field():
    rng = np.random.default_rng(9)
    return Field.filled(rng.integers(0, 2, size=(5, 5)).astype(np.float64))


@pytest.fixture
def drawn_sites(monkeypatch):
    """Candidate indices handed to CandidateGrid.anchor, in draw order."""
    sites: list[int] = []
    anchor = CandidateGrid.anchor

    def recording(grid, index):
        sites.append(int(index))
        return anchor(grid, index)

    monkeypatch.setattr(CandidateGrid, "anchor", recording)
    return sites


def _site_frequencies(sites, size, n):
    return np.bincount(np.asarray(sites), minlength=size) / n


def test_kernel_sampling_matches_softmax_per_site(drawn_sites):
    observed = _two_symbol_field()
    b = 0.01
    cfg = _config(mode={"kind": "kernel", "b": b}, h=4, width=4, rng_seed=1)
    state = place_seed(observed, cfg, seed_stream(1))
    t = LatticePoint(1, 2)
    state.canvas.put(LatticePoint(0, 2), 1.0)
    shape = neighborhood_shape(Scheme.CORNER, 2, t, state.geometry)
    target = extract_vector(state.canvas, shape, t)
    grid = CandidateGrid.for_shape(observed, shape)
    assert 1 < grid.size <= 200

    probs = softmax([log_weight(target.entries - v, b) for v in grid.vectors(observed)])

    n = 10_000
    cache: dict = {}
    drawn_sites.clear()
    for i in range(n):
        synthesize_pixel(state, observed, t, cfg, rng=stream(2, i), weights_cache=cache)
    assert len(drawn_sites) == n
    freq = _site_frequencies(drawn_sites, grid.size, n)
    se = np.sqrt(probs * (1 - probs) / n)
    np.testing.assert_array_less(np.abs(freq - probs), 3 * se + 1e-12)


def test_uniform_sampling_is_flat_over_match_set(drawn_sites):
    observed = Field.filled(np.random.default_rng(4).integers(0, 3, size=(5, 5)) / 2.0)
    cfg = _config(mode={"kind": "uniform", "epsilon": 0.5}, h=4, width=4, rng_seed=1)
    state = place_seed(observed, cfg, seed_stream(1))
    t = LatticePoint(0, 2)
    shape = neighborhood_shape(Scheme.CORNER, 2, t, state.geometry)
    target = extract_vector(state.canvas, shape, t)
    grid = CandidateGrid.for_shape(observed, shape)
    sigma = cfg.spatial_sigma()
    dist = np.array(
        [patch_distance(target, extract_vector(observed, shape, s), sigma) for s in grid.anchors()]
    )
    pool = epsilon_match_set(dist, 0.5)
    probs = np.zeros(grid.size)
    probs[pool] = 1.0 / pool.size

    n = 10_000
    drawn_sites.clear()
    for i in range(n):
        synthesize_pixel(state, observed, t, cfg, rng=stream(3, i))
    freq = _site_frequencies(drawn_sites, grid.size, n)
    se = np.sqrt(probs * (1 - probs) / n)
    np.testing.assert_array_less(np.abs(freq - probs), 3 * se + 1e-12)


def test_uniform_zero_epsilon_picks_best_match(noise_image):
    observed = Field.filled(noise_image)
    cfg = _config(mode={"kind": "uniform", "epsilon": 0.0}, h=5, width=5, rng_seed=8)
    state = place_seed(observed, cfg, seed_stream(8))
    t = LatticePoint(2, 2)
    for p in scheme_ordering(cfg):
        if p == t:
            break
        state.canvas.put(p, synthesize_pixel(state, observed, p, cfg))
        state.cursor += 1
    shape = neighborhood_shape(Scheme.CORNER, 2, t, state.geometry)
    target = extract_vector(state.canvas, shape, t)
    grid = CandidateGrid.for_shape(observed, shape)
    dist = grid.squared_distances(observed, target, state.spatial_for(shape, cfg))
    best_values = set(grid.values(observed)[dist == dist.min()].tolist())
    assert synthesize_pixel(state, observed, t, cfg) in best_values


def test_report_and_poor_match_warning(noise_image, caplog):
    observed = Field.filled(noise_image)
    cfg = _config(h=8, width=8, poor_match_distance=1e-9)
    with caplog.at_level(logging.WARNING, logger="services.resampler.engine"):
        out, report = synthesize_with_report(observed, cfg)
    assert report.pixels == 64 - 4
    assert report.mean_effective_candidates >= 1.0
    assert report.mean_entropy >= 0.0
    assert 0 <= report.poor_matches <= report.pixels
    if report.poor_matches:
        assert "best distance above" in caplog.text
    assert set(report.to_dict()) == {
        "pixels",
        "mean_entropy",
        "mean_effective_candidates",
        "poor_matches",
        "elapsed",
    }


def test_bandwidth_sweep_entropy_grows(noise_image):
    observed = Field.filled(noise_image)
    rows = bandwidth_sweep(observed, _config(h=8, width=8), [0.007, 1.0])
    assert [r["b"] for r in rows] == [0.007, 1.0]
    assert rows[1]["mean_entropy"] > rows[0]["mean_entropy"]
    assert all(0.0 < r["distinct_window_fraction"] <= 1.0 for r in rows)


def test_distinct_window_fraction():
    assert distinct_window_fraction(Field.filled(np.zeros((4, 4)))) == pytest.approx(1 / 9)
    assert distinct_window_fraction(Field.filled([[0.5]])) == 0.0
