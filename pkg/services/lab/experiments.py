# services/lab/experiments.py
"""
Oracle-calibrated experiments on Markov mesh fields.

consistency   window CDF of synthesized output vs the exact law, per observed size
conditional   kernel conditional CDF vs the exact conditional law, per observed size
counterexample  spiral synthesis breaks X1 / S2 dependence given S1
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydField, ValidationError

from orchestrator.task_scheduler import run_replicates
from services.errors import ConfigError, CounterexampleError, PreconditionError
from services.field_core.field import Field
from services.field_core.patches import PatchVector
from services.field_core.shapes import Scheme, Shape, neighborhood_shape
from services.lab.cdf import CdfGrid, EmpiricalCdf, empirical_window_cdf, law_cdf, sup_distance
from services.lab.estimators import kernel_conditional_pmf
from services.lab.mmm import MmmSpec, corner_offsets, gen_mmm_field, gen_mmm_symbols, symbols_of
from services.lab.window_law import (
    WindowKind,
    conditional_mutual_information,
    exact_window_law,
    grouped_joint,
)
from services.resampler.config import SynthesisConfig
from services.resampler.engine import (
    KernelDraw,
    place_seed,
    scheme_ordering,
    synthesize_pixel,
    synthesize_with_report,
)
from services.resampler.rng import (
    child_seed,
    draw_stream,
    floor_stream,
    observed_stream,
    replicate_stream,
)
from services.settings import get_settings
from services.weighting.modes import KernelGaussian

log = logging.getLogger(__name__)

CMI_EPSILON = 1e-9


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    rng_seed: int = PydField(default=0, ge=0, lt=2**64)
    replicates: int = PydField(default=20, ge=1)
    out_side: int = PydField(default=64, ge=2)
    burn_in: int = PydField(default=16, ge=0)
    bandwidth_constant: float = PydField(default=0.25, gt=0.0)
    bandwidth_exponent: float = PydField(default=0.25, gt=0.0)
    oracle_depth: int = PydField(default=12, ge=1)
    n_jobs: int | None = None

    def bandwidth(self, size: int) -> float:
        return self.bandwidth_constant * size ** (-self.bandwidth_exponent)

    @classmethod
    def from_settings(cls, **overrides: Any) -> ExperimentConfig:
        lab = get_settings().lab
        values = {
            "replicates": lab.replicates,
            "out_side": lab.out_side,
            "burn_in": lab.burn_in,
            "bandwidth_constant": lab.bandwidth_constant,
            "bandwidth_exponent": lab.bandwidth_exponent,
            "oracle_depth": lab.oracle_depth,
        }
        if issubclass(cls, CounterexampleConfig):
            values.update(
                size=lab.counterexample_size,
                out_side=lab.counterexample_out_side,
                window_replicates=lab.window_replicates,
                draws=lab.cmi_draws,
            )
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise ConfigError(str(e)) from e


class CounterexampleConfig(ExperimentConfig):
    size: int = PydField(default=256, ge=4)
    out_side: int = PydField(default=128, ge=4)
    window_replicates: int = PydField(default=5, ge=1)
    draws: int = PydField(default=20000, ge=1)


@dataclass(frozen=True)
class ReportRow:
    scheme: str
    T: int
    b: float
    replicate: int
    statistic: str
    value: float


@dataclass
class Report:
    experiment: str
    rows: list[ReportRow] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def values(self, statistic: str, T: int | None = None) -> np.ndarray:
        return np.array(
            [r.value for r in self.rows if r.statistic == statistic and (T is None or r.T == T)]
        )


def median_standard_error(values: np.ndarray) -> float:
    """Large-sample standard error of a sample median (normal approximation)."""
    if values.size < 2:
        return 0.0
    return float(math.sqrt(math.pi / 2.0) * values.std(ddof=1) / math.sqrt(values.size))


def window_grid(spec: MmmSpec, side: int) -> CdfGrid:
    return CdfGrid.discrete(spec.alphabet, side * side)


# --- noise floor ---


def _floor_sample(
    spec: MmmSpec,
    side: int,
    window: int,
    truth: EmpiricalCdf,
    rng: np.random.Generator,
    burn_in: int,
) -> float:
    sample = gen_mmm_field(spec, side, side, rng, burn_in)
    return sup_distance(empirical_window_cdf(sample, window, truth.grid), truth)


def noise_floor(
    spec: MmmSpec,
    side: int,
    replicates: int,
    config: ExperimentConfig | None = None,
    kind: WindowKind = WindowKind.Q,
) -> np.ndarray:
    """Sup distances between exact-law samples of `side` x `side` and the oracle CDF."""
    config = config or ExperimentConfig.from_settings()
    window = kind.side(spec.w)
    law = exact_window_law(spec, kind, depth=config.oracle_depth)
    truth = law_cdf(law, window_grid(spec, window))
    rngs = [floor_stream(config.rng_seed, r) for r in range(replicates)]
    return np.array([_floor_sample(spec, side, window, truth, g, config.burn_in) for g in rngs])


# --- consistency ---


@dataclass(frozen=True)
class _ConsistencyCell:
    spec: MmmSpec
    scheme: Scheme
    size: int
    max_size: int
    ladder: int
    replicate: int
    b: float
    truth: EmpiricalCdf
    config: ExperimentConfig


def _nested_observed(
    spec: MmmSpec, size: int, max_size: int, replicate: int, cfg: ExperimentConfig
) -> Field:
    """Top-left size x size crop of the replicate's largest observed field."""
    master = gen_mmm_symbols(
        spec, max_size, max_size, observed_stream(cfg.rng_seed, replicate), cfg.burn_in
    )
    return Field.filled(spec.values[master[:size, :size]])


def _consistency_cell(cell: _ConsistencyCell) -> dict[str, float]:
    spec, cfg = cell.spec, cell.config
    observed = _nested_observed(spec, cell.size, cell.max_size, cell.replicate, cfg)
    rng = replicate_stream(cfg.rng_seed, cell.ladder, cell.replicate)
    syn = SynthesisConfig(
        scheme=cell.scheme,
        w=spec.w,
        mode=KernelGaussian(b=cell.b),
        out_height=cfg.out_side,
        out_width=cfg.out_side,
        rng_seed=child_seed(rng),
    )
    out, _ = synthesize_with_report(observed, syn)
    emp = empirical_window_cdf(out, spec.w, cell.truth.grid, exclude=syn.canvas().seed_mask())
    floor = _floor_sample(spec, cfg.out_side, spec.w, cell.truth, rng, cfg.burn_in)
    return {"sup_distance": sup_distance(emp, cell.truth), "noise_floor": floor}


def consistency_experiment(
    spec: MmmSpec,
    scheme: Scheme,
    sizes: Sequence[int],
    replicates: int | None = None,
    config: ExperimentConfig | None = None,
) -> Report:
    """
    For each observed size T: synthesize out_side x out_side from an exact MMM
    draw with b = C * T^-delta and measure the sup distance between the w x w
    window CDF of the output (seed excluded) and the oracle CDF.
    """
    config = config or ExperimentConfig.from_settings()
    replicates = replicates or config.replicates
    sizes = sorted(int(s) for s in sizes)
    if not sizes or sizes[0] < scheme.default_seed_side(spec.w):
        raise PreconditionError(f"observed sizes must be >= the seed side, got {sizes}")
    law = exact_window_law(spec, WindowKind.Q, depth=config.oracle_depth)
    truth = law_cdf(law, window_grid(spec, spec.w))

    cells = [
        _ConsistencyCell(spec, scheme, T, sizes[-1], i, r, config.bandwidth(T), truth, config)
        for i, T in enumerate(sizes)
        for r in range(replicates)
    ]
    results = run_replicates(_consistency_cell, cells, config.n_jobs)

    report = Report("consistency")
    for cell, res in zip(cells, results, strict=True):
        for stat in ("sup_distance", "noise_floor"):
            report.rows.append(
                ReportRow(scheme.value, cell.size, cell.b, cell.replicate, stat, res[stat])
            )
        log.info(
            "consistency %s T=%d replicate %d sup %.4g floor %.4g",
            scheme.value,
            cell.size,
            cell.replicate,
            res["sup_distance"],
            res["noise_floor"],
        )

    per_size = []
    for T in sizes:
        sup = report.values("sup_distance", T)
        floor = report.values("noise_floor", T)
        se = math.hypot(median_standard_error(sup), median_standard_error(floor))
        per_size.append(
            {
                "T": T,
                "b": config.bandwidth(T),
                "median_sup_distance": float(np.median(sup)),
                "median_noise_floor": float(np.median(floor)),
                "standard_error": se,
            }
        )
        log.info(
            "consistency %s T=%d median sup %.4g",
            scheme.value,
            T,
            per_size[-1]["median_sup_distance"],
        )
    medians = [c["median_sup_distance"] for c in per_size]
    last = per_size[-1]
    report.summary = {
        "experiment": "consistency",
        "scheme": scheme.value,
        "w": spec.w,
        "replicates": replicates,
        "out_side": config.out_side,
        "boundary_gap": law.boundary_gap,
        "sizes": per_size,
        "strictly_decreasing": all(b < a for a, b in zip(medians, medians[1:])),
        "within_noise_floor": last["median_sup_distance"]
        <= last["median_noise_floor"] + 3.0 * last["standard_error"],
    }
    return report


# --- conditional (kernel conditional CDF vs exact conditional) ---


@dataclass(frozen=True)
class _ConditionalCell:
    spec: MmmSpec
    size: int
    max_size: int
    replicate: int
    b: float
    configs: np.ndarray  # (m, p) symbol configurations with positive probability
    true_cdf: np.ndarray  # (m, k)
    config: ExperimentConfig


def full_corner_shape(w: int) -> Shape:
    return Shape.of(corner_offsets(w, w - 1, w - 1))


def _conditional_cell(cell: _ConditionalCell) -> float:
    spec, cfg = cell.spec, cell.config
    observed = _nested_observed(spec, cell.size, cell.max_size, cell.replicate, cfg)
    shape = full_corner_shape(spec.w)
    worst = 0.0
    for config_row, true_row in zip(cell.configs, cell.true_cdf, strict=True):
        y = PatchVector(shape, spec.values[config_row])
        est = np.cumsum(kernel_conditional_pmf(observed, y, cell.b, spec.values))
        worst = max(worst, float(np.abs(est - true_row).max()))
    return worst


def conditional_experiment(
    spec: MmmSpec,
    sizes: Sequence[int],
    replicates: int | None = None,
    config: ExperimentConfig | None = None,
) -> Report:
    """
    sup over x in the alphabet and over corner configurations y with positive
    probability of |F*(x | y) - F(x | y)|, per observed size.
    """
    config = config or ExperimentConfig.from_settings()
    replicates = replicates or config.replicates
    sizes = sorted(int(s) for s in sizes)
    if not sizes or sizes[0] < spec.w:
        raise PreconditionError(f"observed sizes must be >= w, got {sizes}")
    law = exact_window_law(spec, WindowKind.Q, depth=config.oracle_depth)
    k, p = spec.k, spec.w * spec.w - 1
    joint = law.pmf.reshape(k**p, k)
    marg = joint.sum(axis=1)
    keep = marg > 1e-12
    configs = np.array(np.unravel_index(np.flatnonzero(keep), (k,) * p)).T.reshape(-1, p)
    true_cdf = np.cumsum(joint[keep] / marg[keep, None], axis=1)

    cells = [
        _ConditionalCell(spec, T, sizes[-1], r, config.bandwidth(T), configs, true_cdf, config)
        for T in sizes
        for r in range(replicates)
    ]
    results = run_replicates(_conditional_cell, cells, config.n_jobs)
    report = Report("conditional")
    for cell, value in zip(cells, results, strict=True):
        report.rows.append(
            ReportRow("corner", cell.size, cell.b, cell.replicate, "conditional_sup", value)
        )
        log.info("conditional T=%d replicate %d sup %.4g", cell.size, cell.replicate, value)
    per_size = [
        {
            "T": T,
            "b": config.bandwidth(T),
            "median_conditional_sup": float(np.median(report.values("conditional_sup", T))),
        }
        for T in sizes
    ]
    medians = [c["median_conditional_sup"] for c in per_size]
    report.summary = {
        "experiment": "conditional",
        "w": spec.w,
        "replicates": replicates,
        "configurations": int(configs.shape[0]),
        "sizes": per_size,
        "strictly_decreasing": all(b < a for a, b in zip(medians, medians[1:])),
    }
    return report


# --- counterexample ---


@dataclass(frozen=True)
class ProbeCells:
    """Offsets from the spiral origin of X1, S1 and S2, plus the V window holding them."""

    x: tuple[int, int]
    s1: tuple[tuple[int, int], ...]
    s2: tuple[tuple[int, int], ...]
    window_top_left: tuple[int, int]
    side: int

    def cell(self, offset: tuple[int, int]) -> int:
        top, left = self.window_top_left
        return (offset[0] - top) * self.side + (offset[1] - left)


def probe_cells(w: int) -> ProbeCells:
    """
    X1 is the first spiral pixel after the (2w-1)^2 seed, at (w, w-1); S1 is
    what it conditions on; S2 the remaining seed pixels of the V window
    centred at (1, 0), whose bottom-right cell is X1.
    """
    side = 2 * w - 1
    x = (w, w - 1)
    s1 = tuple((a, b) for a in range(1, w) for b in range(w))
    top, left = 2 - w, 1 - w
    seed = range(-(w - 1), w)
    s2 = tuple(
        (a, b)
        for a in range(top, top + side)
        for b in range(left, left + side)
        if a in seed and b in seed and (a, b) not in s1
    )
    return ProbeCells(x, s1, s2, (top, left), side)


def probe_config(w: int, b: float, rng_seed: int = 0) -> SynthesisConfig:
    """Smallest spiral canvas holding the seed and X1."""
    side = 2 * w + 1
    return SynthesisConfig(
        scheme=Scheme.SPIRAL,
        w=w,
        mode=KernelGaussian(b=b),
        out_height=side,
        out_width=side,
        rng_seed=rng_seed,
    )


def first_pixel_draws(observed: Field, config: SynthesisConfig, draws: int) -> np.ndarray:
    """
    Repeat seed placement plus one spiral step `draws` times. Returns a
    (draws, 1 + |S1| + |S2|) array of intensities: X1, then S1, then S2 cells.
    """
    if config.scheme is not Scheme.SPIRAL:
        raise PreconditionError("first-pixel draws need the spiral scheme")
    probe = probe_cells(config.w)
    t = next(scheme_ordering(config))
    o = config.canvas().origin
    if (t.row - o.row, t.col - o.col) != probe.x:
        raise PreconditionError(f"first spiral pixel {tuple(t)} is not at the probe offset")
    shape = neighborhood_shape(config.scheme, config.w, t, config.canvas())
    if set((t.row + a - o.row, t.col + b - o.col) for a, b in shape.offsets) != set(probe.s1):
        raise PreconditionError("first spiral pixel conditions on an unexpected set")
    rows = np.array([o.row + a for a, _ in probe.s1 + probe.s2])
    cols = np.array([o.col + b for _, b in probe.s1 + probe.s2])
    out = np.empty((draws, 1 + rows.size))
    cache: dict[tuple[Shape, bytes], KernelDraw] = {}
    for d in range(draws):
        rng = draw_stream(config.rng_seed, d)
        state = place_seed(observed, config, rng)
        out[d, 0] = synthesize_pixel(state, observed, t, config, rng=rng, weights_cache=cache)
        out[d, 1:] = state.canvas.values[rows, cols]
    return out


def _config_index(sym: np.ndarray, k: int) -> np.ndarray:
    if sym.shape[1] == 0:
        return np.zeros(sym.shape[0], dtype=np.int64)
    return np.ravel_multi_index(tuple(sym.T), (k,) * sym.shape[1])


def draws_cmi(spec: MmmSpec, draws: np.ndarray, n_s1: int) -> float:
    """Plug-in I(X1; S2 | S1) from first-pixel draws."""
    sym = symbols_of(spec, draws)
    k = spec.k
    n_s2 = sym.shape[1] - 1 - n_s1
    a = _config_index(sym[:, 1 : 1 + n_s1], k)
    b = _config_index(sym[:, 1 + n_s1 :], k)
    counts = np.zeros((k, k**n_s1, k**n_s2))
    np.add.at(counts, (sym[:, 0], a, b), 1.0)
    return conditional_mutual_information(counts)


@dataclass(frozen=True)
class _DrawCell:
    spec: MmmSpec
    replicate: int
    b: float
    config: CounterexampleConfig


def _draw_cell(cell: _DrawCell) -> float:
    spec, cfg = cell.spec, cell.config
    rng = observed_stream(cfg.rng_seed, cell.replicate)
    observed = gen_mmm_field(spec, cfg.size, cfg.size, rng, cfg.burn_in)
    draw_seed = child_seed(replicate_stream(cfg.rng_seed, 0, cell.replicate))
    probe = probe_config(spec.w, cell.b, draw_seed)
    draws = first_pixel_draws(observed, probe, cfg.draws)
    return draws_cmi(spec, draws, len(probe_cells(spec.w).s1))


@dataclass(frozen=True)
class _WindowCell:
    spec: MmmSpec
    replicate: int
    b: float
    truth_q: EmpiricalCdf
    truth_v: EmpiricalCdf
    config: CounterexampleConfig


def _window_cell(cell: _WindowCell) -> dict[str, float]:
    spec, cfg = cell.spec, cell.config
    rng = replicate_stream(cfg.rng_seed, 1, cell.replicate)
    observed = gen_mmm_field(spec, cfg.size, cfg.size, rng, cfg.burn_in)
    syn = SynthesisConfig(
        scheme=Scheme.SPIRAL,
        w=spec.w,
        mode=KernelGaussian(b=cell.b),
        out_height=cfg.out_side,
        out_width=cfg.out_side,
        rng_seed=child_seed(rng),
    )
    out, _ = synthesize_with_report(observed, syn)
    seed = syn.canvas().seed_mask()
    q = empirical_window_cdf(out, spec.w, cell.truth_q.grid, exclude=seed)
    v = empirical_window_cdf(out, 2 * spec.w - 1, cell.truth_v.grid, exclude=seed)
    return {"q_sup": sup_distance(q, cell.truth_q), "v_sup": sup_distance(v, cell.truth_v)}


def counterexample_experiment(spec: MmmSpec, config: CounterexampleConfig | None = None) -> Report:
    """
    Under the true law X1 depends on S2 given S1; spiral synthesis draws X1
    from S1 alone, so the synthesized CMI collapses while the Q window law
    stays close and the V window law does not.
    """
    config = config or CounterexampleConfig.from_settings()
    w = spec.w
    probe = probe_cells(w)
    law_v = exact_window_law(spec, WindowKind.V, depth=config.oracle_depth)
    law_q = exact_window_law(spec, WindowKind.Q, depth=config.oracle_depth)
    joint = grouped_joint(
        law_v,
        [probe.cell(probe.x)],
        [probe.cell(c) for c in probe.s1],
        [probe.cell(c) for c in probe.s2],
    )
    cmi_true = conditional_mutual_information(joint)
    if cmi_true <= CMI_EPSILON:
        raise CounterexampleError()
    b = config.bandwidth(config.size)

    draw_cells = [_DrawCell(spec, r, b, config) for r in range(config.replicates)]
    cmis = run_replicates(_draw_cell, draw_cells, config.n_jobs)
    truth_q = law_cdf(law_q, window_grid(spec, w))
    truth_v = law_cdf(law_v, window_grid(spec, 2 * w - 1))
    window_cells = [
        _WindowCell(spec, r, b, truth_q, truth_v, config) for r in range(config.window_replicates)
    ]
    sups = run_replicates(_window_cell, window_cells, config.n_jobs)

    report = Report("counterexample")
    for r, value in enumerate(cmis):
        report.rows.append(ReportRow("spiral", config.size, b, r, "cmi_synthesized", value))
        log.info("counterexample replicate %d cmi %.4g", r, value)
    for r, res in enumerate(sups):
        for stat in ("q_sup", "v_sup"):
            report.rows.append(ReportRow("spiral", config.size, b, r, stat, res[stat]))
        log.info("counterexample window %d q %.4g v %.4g", r, res["q_sup"], res["v_sup"])

    cmi_synth = float(np.median(cmis))
    q_sup = float(np.median([s["q_sup"] for s in sups]))
    v_sup = float(np.median([s["v_sup"] for s in sups]))
    log.info(
        "counterexample cmi_true %.4g synthesized %.4g q %.4g v %.4g",
        cmi_true,
        cmi_synth,
        q_sup,
        v_sup,
    )
    report.summary = {
        "experiment": "counterexample",
        "w": w,
        "T": config.size,
        "b": b,
        "out_side": config.out_side,
        "draws": config.draws,
        "cmi_true": cmi_true,
        "median_cmi_synthesized": cmi_synth,
        "median_q_sup": q_sup,
        "median_v_sup": v_sup,
        "boundary_gap_q": law_q.boundary_gap,
        "boundary_gap_v": law_v.boundary_gap,
        "cmi_collapsed": cmi_synth < cmi_true / 4.0,
        "v_exceeds_q": v_sup > q_sup,
    }
    return report
