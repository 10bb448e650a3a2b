# services/field_core/field.py
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from services.errors import PreconditionError


class LatticePoint(NamedTuple):
    row: int
    col: int

    def norm_inf(self) -> int:
        return max(abs(self.row), abs(self.col))


@dataclass(frozen=True, eq=False)
class Field:
    """
    Grayscale intensities on a height x width grid plus a filled-mask.

    `values` and `mask` are numpy arrays of shape (height, width). Only filled
    pixels carry meaning; every filled value lies in [0, 1]. The arrays are
    mutated in place during synthesis (single writer), otherwise treated as
    read-only.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise PreconditionError(f"field must be 2-D, got shape {self.values.shape}")
        if self.values.shape != self.mask.shape:
            raise PreconditionError("values and mask shapes differ")
        if self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise PreconditionError("field dimensions must be >= 1")
        filled = self.values[self.mask]
        if filled.size and not (np.all(filled >= 0.0) and np.all(filled <= 1.0)):
            raise PreconditionError("filled intensities must lie in [0, 1]")

    @classmethod
    def filled(cls, values: np.ndarray | list[list[float]]) -> Field:
        arr = np.array(values, dtype=np.float64)
        return cls(arr, np.ones(arr.shape, dtype=bool))

    @classmethod
    def empty(cls, height: int, width: int) -> Field:
        if height < 1 or width < 1:
            raise PreconditionError("field dimensions must be >= 1")
        return cls(np.zeros((height, width)), np.zeros((height, width), dtype=bool))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    def contains(self, point: LatticePoint) -> bool:
        return 0 <= point.row < self.height and 0 <= point.col < self.width

    def get(self, point: LatticePoint) -> float:
        if not self.contains(point):
            raise PreconditionError(f"point {tuple(point)} outside {self.height}x{self.width}")
        if not self.mask[point.row, point.col]:
            raise PreconditionError(f"point {tuple(point)} is not filled")
        return float(self.values[point.row, point.col])

    def put(self, point: LatticePoint, value: float) -> None:
        if not self.contains(point):
            raise PreconditionError(f"point {tuple(point)} outside {self.height}x{self.width}")
        if not 0.0 <= value <= 1.0:
            raise PreconditionError(f"intensity {value} outside [0, 1]")
        self.values[point.row, point.col] = value
        self.mask[point.row, point.col] = True

    def copy(self) -> Field:
        return Field(self.values.copy(), self.mask.copy())

    def value_multiset(self) -> np.ndarray:
        return np.sort(self.values[self.mask])
