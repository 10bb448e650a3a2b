# services/field_core/patches.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from services.errors import PreconditionError, ShapeMismatchError
from services.field_core.field import Field, LatticePoint
from services.field_core.shapes import Shape


@dataclass(frozen=True, eq=False)
class PatchVector:
    """Intensities at anchor+o for o in shape, in the shape's canonical order."""

    shape: Shape
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.shape != (self.shape.p,):
            raise ShapeMismatchError(
                f"patch has {self.entries.shape} entries, shape needs ({self.shape.p},)"
            )
        if not (np.all(self.entries >= 0.0) and np.all(self.entries <= 1.0)):
            raise PreconditionError("patch entries must lie in [0, 1]")

    @property
    def p(self) -> int:
        return self.shape.p


def extract_vector(field: Field, shape: Shape, anchor: LatticePoint) -> PatchVector:
    rows = anchor.row + shape.array[:, 0]
    cols = anchor.col + shape.array[:, 1]
    inside = (rows >= 0) & (rows < field.height) & (cols >= 0) & (cols < field.width)
    if not inside.all():
        raise PreconditionError(f"shape leaves the field around {tuple(anchor)}")
    if not field.mask[rows, cols].all():
        raise PreconditionError(f"shape touches unfilled pixels around {tuple(anchor)}")
    return PatchVector(shape, field.values[rows, cols].astype(np.float64))


@dataclass(frozen=True)
class CandidateGrid:
    """
    Anchors s of a complete field such that s and s+o lie inside for every o.
    They always form a rectangle [row_start, row_stop) x [col_start, col_stop);
    every array method returns candidates in raster order.
    """

    shape: Shape
    row_start: int
    row_stop: int
    col_start: int
    col_stop: int

    @classmethod
    def for_shape(cls, observed: Field, shape: Shape) -> CandidateGrid:
        if not observed.is_complete:
            raise PreconditionError("observed field must be fully filled")
        dr_lo, dr_hi, dc_lo, dc_hi = shape.extent
        return cls(
            shape,
            -dr_lo,
            max(-dr_lo, observed.height - dr_hi),
            -dc_lo,
            max(-dc_lo, observed.width - dc_hi),
        )

    @property
    def n_rows(self) -> int:
        return self.row_stop - self.row_start

    @property
    def n_cols(self) -> int:
        return self.col_stop - self.col_start

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    def anchor(self, index: int) -> LatticePoint:
        r, c = divmod(int(index), self.n_cols)
        return LatticePoint(self.row_start + r, self.col_start + c)

    def anchors(self) -> list[LatticePoint]:
        return [
            LatticePoint(r, c)
            for r in range(self.row_start, self.row_stop)
            for c in range(self.col_start, self.col_stop)
        ]

    def _view(self, observed: Field, drow: int, dcol: int) -> np.ndarray:
        return observed.values[
            self.row_start + drow : self.row_stop + drow,
            self.col_start + dcol : self.col_stop + dcol,
        ]

    def values(self, observed: Field) -> np.ndarray:
        return self._view(observed, 0, 0).ravel()

    def vectors(self, observed: Field) -> np.ndarray:
        """(N, p) matrix of candidate patch vectors."""
        cols = [self._view(observed, a, b).ravel() for a, b in self.shape.offsets]
        return np.stack(cols, axis=1) if cols else np.empty((self.size, 0))

    def squared_distances(
        self, observed: Field, target: PatchVector, weights: np.ndarray | None = None
    ) -> np.ndarray:
        """
        sum_o g(o) * (X_{s+o} - y_o)^2 for every candidate s; g defaults to 1.
        Accumulated offset by offset in canonical order so results are reproducible.
        """
        if target.shape != self.shape:
            raise ShapeMismatchError("target vector shape differs from candidate shape")
        acc = np.zeros((self.n_rows, self.n_cols))
        if self.is_empty:
            return acc.ravel()
        for idx, (a, b) in enumerate(self.shape.offsets):
            diff = self._view(observed, a, b) - target.entries[idx]
            if weights is None:
                acc += diff * diff
            else:
                acc += weights[idx] * (diff * diff)
        return acc.ravel()


def enumerate_candidates(observed: Field, shape: Shape) -> list[LatticePoint]:
    return CandidateGrid.for_shape(observed, shape).anchors()
