# services/field_core/shapes.py
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from services.errors import PreconditionError
from services.field_core.field import LatticePoint
from services.field_core.ordering import raster_index, spiral_index

Offset = tuple[int, int]


class Scheme(str, Enum):
    CORNER = "corner"
    RECTANGULAR = "rectangular"
    SPIRAL = "spiral"

    @property
    def is_raster(self) -> bool:
        return self is not Scheme.SPIRAL

    def default_seed_side(self, w: int) -> int:
        return 2 * w - 1 if self is Scheme.SPIRAL else w


@dataclass(frozen=True)
class Shape:
    """
    Conditioning shape: a non-empty set of nonzero offsets in canonical
    (raster-sorted) order. Build with `Shape.of` when the input order is arbitrary.
    """

    offsets: tuple[Offset, ...]
    _array: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not self.offsets:
            raise PreconditionError("shape must be non-empty")
        if (0, 0) in self.offsets:
            raise PreconditionError("shape must not contain the zero offset")
        if len(set(self.offsets)) != len(self.offsets):
            raise PreconditionError("shape offsets must be distinct")
        if list(self.offsets) != sorted(self.offsets):
            raise PreconditionError("shape offsets must be in canonical order")
        arr = np.array(self.offsets, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "_array", arr)

    @classmethod
    def of(cls, offsets: Iterable[Offset]) -> Shape:
        return cls(tuple(sorted((int(a), int(b)) for a, b in offsets)))

    @property
    def p(self) -> int:
        return len(self.offsets)

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def extent(self) -> tuple[int, int, int, int]:
        """(min drow, max drow, min dcol, max dcol), each widened to include 0."""
        a = self._array
        return (
            min(0, int(a[:, 0].min())),
            max(0, int(a[:, 0].max())),
            min(0, int(a[:, 1].min())),
            max(0, int(a[:, 1].max())),
        )

    def key(self) -> str:
        return ",".join(f"{a}:{b}" for a, b in self.offsets)


@dataclass(frozen=True)
class Canvas:
    """Output geometry: dimensions, seed placement and the fill ordering."""

    height: int
    width: int
    seed_side: int
    scheme: Scheme

    def __post_init__(self) -> None:
        if self.seed_side < 1:
            raise PreconditionError("seed side must be >= 1")
        if self.height < self.seed_side or self.width < self.seed_side:
            raise PreconditionError(
                f"canvas {self.height}x{self.width} cannot hold a "
                f"{self.seed_side}x{self.seed_side} seed"
            )

    @property
    def origin(self) -> LatticePoint:
        return LatticePoint((self.height - 1) // 2, (self.width - 1) // 2)

    @property
    def seed_top_left(self) -> LatticePoint:
        if self.scheme.is_raster:
            return LatticePoint(0, 0)
        half = (self.seed_side - 1) // 2
        o = self.origin
        return LatticePoint(o.row - half, o.col - half)

    def in_seed(self, rows: np.ndarray | int, cols: np.ndarray | int) -> np.ndarray:
        top, left = self.seed_top_left
        rr = np.asarray(rows)
        cc = np.asarray(cols)
        m = self.seed_side
        return (rr >= top) & (rr < top + m) & (cc >= left) & (cc < left + m)

    def seed_mask(self) -> np.ndarray:
        rows, cols = np.indices((self.height, self.width))
        return self.in_seed(rows, cols)

    def on_canvas(self, rows: np.ndarray | int, cols: np.ndarray | int) -> np.ndarray:
        rr = np.asarray(rows)
        cc = np.asarray(cols)
        return (rr >= 0) & (rr < self.height) & (cc >= 0) & (cc < self.width)

    def rank(self, rows: np.ndarray | int, cols: np.ndarray | int) -> np.ndarray:
        if self.scheme.is_raster:
            return raster_index(rows, cols, self.width)
        o = self.origin
        return spiral_index(np.asarray(rows) - o.row, np.asarray(cols) - o.col)

    def filled_before(self, t: LatticePoint, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Which of the given canvas points are filled when t is about to be synthesized."""
        inside = self.on_canvas(rows, cols)
        before = self.rank(rows, cols) < self.rank(t.row, t.col)
        return inside & (self.in_seed(rows, cols) | before)


@lru_cache(maxsize=32)
def _window_offsets(scheme: Scheme, w: int) -> np.ndarray:
    lo = -(w - 1)
    col_hi = 0 if scheme is Scheme.CORNER else w - 1
    row_hi = w - 1 if scheme is Scheme.SPIRAL else 0
    dr, dc = np.meshgrid(np.arange(lo, row_hi + 1), np.arange(lo, col_hi + 1), indexing="ij")
    offs = np.stack([dr.ravel(), dc.ravel()], axis=1)
    offs = offs[(offs[:, 0] != 0) | (offs[:, 1] != 0)]
    offs.setflags(write=False)
    return offs


def neighborhood_shape(scheme: Scheme, w: int, t: LatticePoint, canvas: Canvas) -> Shape:
    """
    Offsets o inside the scheme's window such that t+o is already filled
    when t is synthesized (seed pixels or earlier pixels of the ordering).
    """
    if w < 2:
        raise PreconditionError(f"window parameter w must be >= 2, got {w}")
    if not bool(canvas.on_canvas(t.row, t.col)):
        raise PreconditionError(f"point {tuple(t)} is off the canvas")
    if bool(canvas.in_seed(t.row, t.col)):
        raise PreconditionError(f"point {tuple(t)} lies in the seed region")
    offs = _window_offsets(scheme, w)
    keep = canvas.filled_before(t, t.row + offs[:, 0], t.col + offs[:, 1])
    chosen = offs[keep]
    if chosen.shape[0] == 0:
        raise PreconditionError(f"no filled neighbours around {tuple(t)}")
    # window offsets are generated in raster order already
    return Shape(tuple((int(a), int(b)) for a, b in chosen))
