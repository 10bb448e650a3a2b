# services/lab/window_law.py
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from services.errors import EnumerationLimitError, PreconditionError
from services.lab.mmm import MmmSpec
from services.settings import LabDefaults, get_settings

log = logging.getLogger(__name__)


class WindowKind(str, Enum):
    Q = "q"  # w x w
    V = "v"  # (2w-1) x (2w-1), centred

    def side(self, w: int) -> int:
        return w if self is WindowKind.Q else 2 * w - 1


@dataclass(frozen=True, eq=False)
class WindowLaw:
    """Joint pmf of a square window; axes are window cells in raster order."""

    alphabet: tuple[float, ...]
    side: int
    pmf: np.ndarray
    boundary_gap: float = 0.0

    def __post_init__(self) -> None:
        if self.pmf.shape != (len(self.alphabet),) * (self.side * self.side):
            raise PreconditionError(
                f"pmf shape {self.pmf.shape} does not match a {self.side}x{self.side} window"
            )

    @property
    def area(self) -> int:
        return self.side * self.side

    def cell(self, row: int, col: int) -> int:
        return row * self.side + col

    def marginal(self, cells: Sequence[int]) -> np.ndarray:
        """Joint pmf of the given cells, axes in the order given."""
        cells = list(cells)
        drop = tuple(i for i in range(self.area) if i not in cells)
        out = self.pmf.sum(axis=drop) if drop else self.pmf
        kept = sorted(cells)
        return np.transpose(out, [kept.index(c) for c in cells])


def _forward_law(spec: MmmSpec, side: int, top: int, max_states: int) -> np.ndarray:
    """
    Joint law of the side x side window whose top-left corner is (top, top),
    by forward enumeration in raster order over rows 0..top+side-1 and
    columns 0..top+side-1. A pixel is summed out as soon as it is outside
    the window and no later pixel of the rectangle conditions on it.
    """
    w, k = spec.w, spec.k
    last = top + side - 1
    ncols = last + 1
    target = {(top + a, top + b) for a in range(side) for b in range(side)}

    def needed_after(q: tuple[int, int], cur: int) -> bool:
        r = min(q[0] + w - 1, last)
        c = min(q[1] + w - 1, last)
        return r * ncols + c > cur

    tracked: list[tuple[int, int]] = []
    pmf = np.array(1.0)
    for i in range(last + 1):
        for j in range(ncols):
            key, table = spec.table_for(i, j)
            n = len(tracked)
            if k ** (n + 1) > max_states:
                raise EnumerationLimitError(
                    f"window law needs {k}^{n + 1} states (limit {max_states}); use smaller k or w"
                )
            pos = {q: a for a, q in enumerate(tracked)}
            sub = [pos[(i + a, j + b)] for a, b in key] + [n]
            pmf = np.einsum(pmf, list(range(n)), table, sub, list(range(n + 1)))
            tracked.append((i, j))
            cur = i * ncols + j
            drop = tuple(
                a for a, q in enumerate(tracked) if q not in target and not needed_after(q, cur)
            )
            if drop:
                pmf = pmf.sum(axis=drop)
                tracked = [q for a, q in enumerate(tracked) if a not in drop]

    order = sorted(range(len(tracked)), key=lambda a: tracked[a])
    return np.transpose(pmf, order)


def exact_window_law(
    spec: MmmSpec,
    kind: WindowKind,
    *,
    depth: int | None = None,
    lab: LabDefaults | None = None,
) -> WindowLaw:
    """
    Stationary law of a Q or V window approximated deep inside the field.
    `boundary_gap` is the sup difference to the same window one step closer
    to the border; it bounds how far the result still is from stationarity.
    """
    lab = lab or get_settings().lab
    depth = lab.oracle_depth if depth is None else depth
    if depth < 1:
        raise PreconditionError("oracle depth must be >= 1")
    side = kind.side(spec.w)
    if spec.k ** (side * side) > lab.max_configurations:
        raise EnumerationLimitError(
            f"{spec.k}^{side * side} window configurations exceed {lab.max_configurations}; "
            "use smaller k or w"
        )
    deep = _forward_law(spec, side, depth, lab.max_oracle_states)
    shallow = _forward_law(spec, side, depth - 1, lab.max_oracle_states)
    gap = float(np.abs(deep - shallow).max())
    if gap > lab.oracle_tolerance:
        log.warning(
            "window law boundary gap %.3g exceeds %.3g at depth %d",
            gap,
            lab.oracle_tolerance,
            depth,
        )
    pmf = deep / deep.sum()
    return WindowLaw(spec.alphabet, side, pmf, gap)


def conditional_mutual_information(joint: np.ndarray) -> float:
    """
    I(X; B | A) in nats for a pmf (or count table) with axes (X, A, B).
    Zero cells contribute nothing.
    """
    p = np.asarray(joint, dtype=np.float64)
    if p.ndim != 3:
        raise PreconditionError("joint must have axes (X, A, B)")
    total = p.sum()
    if total <= 0:
        raise PreconditionError("joint has no mass")
    p = p / total
    pa = p.sum(axis=(0, 2))
    pxa = p.sum(axis=2)
    pab = p.sum(axis=0)
    num = p * pa[None, :, None]
    den = pxa[:, :, None] * pab[None, :, :]
    nz = p > 0
    return float(max(0.0, np.sum(p[nz] * np.log(num[nz] / den[nz]))))


def grouped_joint(
    law: WindowLaw, x: Sequence[int], a: Sequence[int], b: Sequence[int]
) -> np.ndarray:
    """Marginal over cells x + a + b reshaped to (k^|x|, k^|a|, k^|b|)."""
    k = len(law.alphabet)
    m = law.marginal([*x, *a, *b])
    return m.reshape(k ** len(x), k ** len(a), k ** len(b))
