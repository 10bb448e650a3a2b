# services/lab/cdf.py
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from services.errors import GridMismatchError, PreconditionError
from services.field_core.field import Field
from services.lab.window_law import WindowLaw
from services.settings import get_settings


@dataclass(frozen=True, eq=False)
class CdfGrid:
    """Product grid: the same sorted axis repeated over `dims` coordinates."""

    axis: np.ndarray
    dims: int

    def __post_init__(self) -> None:
        if self.axis.ndim != 1 or self.axis.size == 0:
            raise PreconditionError("grid axis must be a non-empty 1-D array")
        if np.any(np.diff(self.axis) <= 0):
            raise PreconditionError("grid axis must be strictly increasing")
        if self.dims < 1:
            raise PreconditionError("grid needs at least one dimension")

    @classmethod
    def discrete(cls, alphabet: Sequence[float], dims: int) -> CdfGrid:
        return cls(np.asarray(sorted(alphabet), dtype=np.float64), dims)

    @classmethod
    def continuous(cls, dims: int, points: int | None = None, cap: int | None = None) -> CdfGrid:
        """Equispaced axis on [0, 1]; thinned until the product fits under `cap`."""
        lab = get_settings().lab
        n = points or lab.continuous_grid_points
        cap = cap or lab.max_grid_points
        while n > 1 and n**dims > cap:
            n -= 1
        return cls(np.linspace(0.0, 1.0, n), dims)

    @property
    def points(self) -> int:
        return int(self.axis.size)

    @property
    def size(self) -> int:
        return self.points**self.dims

    def same_as(self, other: CdfGrid) -> bool:
        return self.dims == other.dims and np.array_equal(self.axis, other.axis)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    grid: CdfGrid
    values: np.ndarray  # shape (points,) * dims


def _cumulate(hist: np.ndarray, grid: CdfGrid) -> np.ndarray:
    out = hist
    for ax in range(grid.dims):
        out = np.cumsum(out, axis=ax)
    # drop the overflow bin kept for values above the last grid point
    return out[(slice(0, grid.points),) * grid.dims]


def cdf_from_samples(samples: np.ndarray, grid: CdfGrid) -> EmpiricalCdf:
    """Fraction of sample vectors that are <= each grid point coordinatewise."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != grid.dims:
        raise GridMismatchError(f"samples shape {x.shape} does not match grid dims {grid.dims}")
    if x.shape[0] == 0:
        raise PreconditionError("no samples")
    bins = grid.points + 1
    idx = np.searchsorted(grid.axis, x, side="left")
    flat = np.ravel_multi_index(tuple(idx.T), (bins,) * grid.dims)
    hist = np.bincount(flat, minlength=bins**grid.dims).reshape((bins,) * grid.dims)
    return EmpiricalCdf(grid, _cumulate(hist.astype(np.float64), grid) / x.shape[0])


def window_samples(field: Field, side: int, exclude: np.ndarray | None = None) -> np.ndarray:
    """All side x side windows as rows (raster cell order), minus those touching `exclude`."""
    if field.height < side or field.width < side:
        raise PreconditionError(f"field {field.height}x{field.width} smaller than window {side}")
    win = sliding_window_view(field.values, (side, side))
    rows = win.reshape(-1, side * side)
    if exclude is not None:
        touched = sliding_window_view(exclude, (side, side)).any(axis=(2, 3)).ravel()
        rows = rows[~touched]
    return rows


def empirical_window_cdf(
    field: Field, w: int, grid: CdfGrid, exclude: np.ndarray | None = None
) -> EmpiricalCdf:
    return cdf_from_samples(window_samples(field, w, exclude), grid)


def law_cdf(law: WindowLaw, grid: CdfGrid) -> EmpiricalCdf:
    """CDF of an exact window law evaluated on a grid."""
    if grid.dims != law.area:
        raise GridMismatchError(f"grid dims {grid.dims} != window area {law.area}")
    bins = grid.points + 1
    gi = np.searchsorted(grid.axis, np.asarray(law.alphabet), side="left")
    hist = law.pmf
    for ax in range(law.area):
        moved = np.moveaxis(hist, ax, 0)
        out = np.zeros((bins,) + moved.shape[1:])
        np.add.at(out, gi, moved)
        hist = np.moveaxis(out, 0, ax)
    return EmpiricalCdf(grid, _cumulate(hist, grid))


def sup_distance(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("CDFs are evaluated on different grids")
    return float(np.abs(a.values - b.values).max())
