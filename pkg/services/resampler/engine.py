# services/resampler/engine.py
from __future__ import annotations

import logging
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from services.errors import EmptyCandidateSetError, PreconditionError, ShapeMismatchError
from services.field_core.field import Field, LatticePoint
from services.field_core.ordering import iter_spiral
from services.field_core.patches import CandidateGrid, extract_vector
from services.field_core.shapes import Canvas, Shape, neighborhood_shape
from services.resampler.config import SynthesisConfig
from services.resampler.rng import pixel_stream, seed_stream
from services.weighting.kernels import log_weights, normalize_weights, sample_index
from services.weighting.matching import epsilon_match_set, spatial_weights
from services.weighting.modes import KernelGaussian

log = logging.getLogger(__name__)

# memoised kernel draws per synthesis; each holds one cumulative array per candidate set
WEIGHTS_CACHE_LIMIT = 256


@dataclass
class PixelStats:
    entropy: float
    effective_candidates: float
    best_distance: float


@dataclass(frozen=True, eq=False)
class KernelDraw:
    cdf: np.ndarray
    entropy: float
    effective_candidates: float
    best_distance: float


@dataclass
class SynthesisState:
    """
    Canvas under construction. The filled set is the seed plus every pixel
    of the ordering before `cursor`.
    """

    canvas: Field
    geometry: Canvas
    rng_seed: int
    cursor: int = 0
    seed_origin: LatticePoint = LatticePoint(0, 0)
    _grids: dict[Shape, CandidateGrid] = field(default_factory=dict, repr=False)
    _spatial: dict[Shape, np.ndarray] = field(default_factory=dict, repr=False)

    def grid_for(self, observed: Field, shape: Shape) -> CandidateGrid:
        grid = self._grids.get(shape)
        if grid is None:
            grid = CandidateGrid.for_shape(observed, shape)
            self._grids[shape] = grid
        return grid

    def spatial_for(self, shape: Shape, config: SynthesisConfig) -> np.ndarray:
        g = self._spatial.get(shape)
        if g is None:
            g = spatial_weights(shape, config.spatial_sigma())
            self._spatial[shape] = g
        return g


@dataclass
class SynthesisReport:
    pixels: int = 0
    mean_entropy: float = 0.0
    mean_effective_candidates: float = 0.0
    poor_matches: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "pixels": self.pixels,
            "mean_entropy": self.mean_entropy,
            "mean_effective_candidates": self.mean_effective_candidates,
            "poor_matches": self.poor_matches,
            "elapsed": round(self.elapsed, 6),
        }


def place_seed(
    observed: Field, config: SynthesisConfig, rng: np.random.Generator
) -> SynthesisState:
    """Copy a uniformly chosen seed block of `observed` onto an empty canvas."""
    m = config.side
    if observed.height < m or observed.width < m:
        raise PreconditionError(
            f"observed {observed.height}x{observed.width} smaller than the {m}x{m} seed"
        )
    top = int(rng.integers(observed.height - m + 1))
    left = int(rng.integers(observed.width - m + 1))
    geometry = config.canvas()
    canvas = Field.empty(config.out_height, config.out_width)
    r0, c0 = geometry.seed_top_left
    canvas.values[r0 : r0 + m, c0 : c0 + m] = observed.values[top : top + m, left : left + m]
    canvas.mask[r0 : r0 + m, c0 : c0 + m] = True
    return SynthesisState(canvas, geometry, config.rng_seed, seed_origin=LatticePoint(top, left))


def scheme_ordering(config: SynthesisConfig) -> Iterator[LatticePoint]:
    """Every non-seed canvas pixel once, in raster or spiral order."""
    geometry = config.canvas()
    h, w = geometry.height, geometry.width
    if geometry.scheme.is_raster:
        for r in range(h):
            for c in range(w):
                if not geometry.in_seed(r, c):
                    yield LatticePoint(r, c)
        return
    o = geometry.origin
    remaining = h * w - geometry.seed_side**2
    max_ring = max(o.row, h - 1 - o.row, o.col, w - 1 - o.col)
    for pt in iter_spiral(max_ring):
        if remaining == 0:
            return
        r, c = o.row + pt.row, o.col + pt.col
        if 0 <= r < h and 0 <= c < w and not geometry.in_seed(r, c):
            remaining -= 1
            yield LatticePoint(r, c)


def synthesize_pixel(
    state: SynthesisState,
    observed: Field,
    t: LatticePoint,
    config: SynthesisConfig,
    rng: np.random.Generator | None = None,
    stats: list[PixelStats] | None = None,
    weights_cache: dict[tuple[Shape, bytes], KernelDraw] | None = None,
) -> float:
    """
    Resample one intensity for t. Kernel mode draws a candidate with
    probability proportional to K_b(Y*_t - Y_t(s)); uniform mode draws
    uniformly from the epsilon-match set. The value is always observed[N].
    `weights_cache` memoises kernel draws per conditioning vector; hits and
    misses consume the rng identically.
    """
    if rng is None:
        rng = pixel_stream(state.rng_seed, state.cursor)
    shape = neighborhood_shape(config.scheme, config.w, t, state.geometry)
    target = extract_vector(state.canvas, shape, t)
    grid = state.grid_for(observed, shape)
    if grid.is_empty:
        raise EmptyCandidateSetError()
    if grid.shape != target.shape:
        raise ShapeMismatchError(f"candidate shape {grid.shape.key()} != {target.shape.key()}")

    if isinstance(config.mode, KernelGaussian):
        memo_key = (shape, target.entries.tobytes())
        draw = weights_cache.get(memo_key) if weights_cache is not None else None
        if draw is None:
            sq = grid.squared_distances(observed, target)
            weights = normalize_weights(log_weights(sq, shape.p, config.mode.b))
            draw = KernelDraw(
                weights.cdf(), weights.entropy(), weights.effective_size(), float(sq.min())
            )
            if weights_cache is not None and len(weights_cache) < WEIGHTS_CACHE_LIMIT:
                weights_cache[memo_key] = draw
        idx = sample_index(draw.cdf, rng)
        best = draw.best_distance
        if stats is not None:
            stats.append(PixelStats(draw.entropy, draw.effective_candidates, best))
    else:
        g = state.spatial_for(shape, config)
        dist = grid.squared_distances(observed, target, g)
        pool = epsilon_match_set(dist, config.mode.epsilon)
        idx = int(pool[rng.integers(pool.size)])
        best = float(dist.min())
        if stats is not None:
            stats.append(PixelStats(float(np.log(pool.size)), float(pool.size), best))

    if config.poor_match_distance is not None and best > config.poor_match_distance:
        log.debug("poor match at %s: best distance %.6g", tuple(t), best)
    anchor = grid.anchor(idx)
    return float(observed.values[anchor.row, anchor.col])


def synthesize_with_report(
    observed: Field, config: SynthesisConfig
) -> tuple[Field, SynthesisReport]:
    if not observed.is_complete:
        raise PreconditionError("observed field must be fully filled")
    started = time.perf_counter()
    state = place_seed(observed, config, seed_stream(config.rng_seed))
    stats: list[PixelStats] = []
    cache: dict[tuple[Shape, bytes], KernelDraw] = {}
    for t in scheme_ordering(config):
        value = synthesize_pixel(state, observed, t, config, stats=stats, weights_cache=cache)
        state.canvas.put(t, value)
        state.cursor += 1

    report = SynthesisReport(pixels=state.cursor, elapsed=time.perf_counter() - started)
    if stats:
        report.mean_entropy = float(np.mean([s.entropy for s in stats]))
        report.mean_effective_candidates = float(np.mean([s.effective_candidates for s in stats]))
        if config.poor_match_distance is not None:
            report.poor_matches = sum(s.best_distance > config.poor_match_distance for s in stats)
    if report.poor_matches:
        log.warning(
            "%d of %d pixels had best distance above %g",
            report.poor_matches,
            report.pixels,
            config.poor_match_distance,
        )
    log.info(
        "synthesized %dx%d (%s, w=%d) in %.3fs",
        config.out_height,
        config.out_width,
        config.scheme.value,
        config.w,
        report.elapsed,
    )
    return state.canvas, report


def synthesize(observed: Field, config: SynthesisConfig) -> Field:
    out, _ = synthesize_with_report(observed, config)
    return out


def distinct_window_fraction(field_: Field, side: int = 2) -> float:
    if field_.height < side or field_.width < side:
        return 0.0
    windows = sliding_window_view(field_.values, (side, side)).reshape(-1, side * side)
    return float(np.unique(windows, axis=0).shape[0] / windows.shape[0])


def bandwidth_sweep(
    observed: Field, config: SynthesisConfig, bandwidths: Sequence[float]
) -> list[dict[str, Any]]:
    """Rerun kernel-mode synthesis for each bandwidth with the same seed."""
    rows: list[dict[str, Any]] = []
    for b in bandwidths:
        out, report = synthesize_with_report(observed, config.with_bandwidth(float(b)))
        rows.append(
            {
                "b": float(b),
                "mean_entropy": report.mean_entropy,
                "mean_effective_candidates": report.mean_effective_candidates,
                "distinct_window_fraction": distinct_window_fraction(out),
            }
        )
    return rows
