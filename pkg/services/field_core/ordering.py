# services/field_core/ordering.py
"""
Pixel orderings on the lattice.

The spiral starts at the origin and walks square rings clockwise. Ring r >= 1
starts at (r, r-1), runs along row r towards col -r, up column -r, along row -r
towards col r and down column r, ending at (r, r); the next ring starts right
below that corner. Its first nine points are

    (0,0) (1,0) (1,-1) (0,-1) (-1,-1) (-1,0) (-1,1) (0,1) (1,1)
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from services.field_core.field import LatticePoint


def ring_points(r: int) -> list[LatticePoint]:
    if r == 0:
        return [LatticePoint(0, 0)]
    pts = [LatticePoint(r, c) for c in range(r - 1, -r - 1, -1)]
    pts += [LatticePoint(row, -r) for row in range(r - 1, -r - 1, -1)]
    pts += [LatticePoint(-r, c) for c in range(-r + 1, r + 1)]
    pts += [LatticePoint(row, r) for row in range(-r + 1, r + 1)]
    return pts


def iter_spiral(max_ring: int | None = None) -> Iterator[LatticePoint]:
    r = 0
    while max_ring is None or r <= max_ring:
        yield from ring_points(r)
        r += 1


def spiral_order(n: int) -> list[LatticePoint]:
    """First n points t0, t1, ... of the spiral ordering."""
    out: list[LatticePoint] = []
    if n <= 0:
        return out
    for pt in iter_spiral():
        out.append(pt)
        if len(out) == n:
            break
    return out


def spiral_index(rows: np.ndarray | int, cols: np.ndarray | int) -> np.ndarray:
    """Rank of each point in the spiral ordering (vectorised inverse of iter_spiral)."""
    rr = np.asarray(rows, dtype=np.int64)
    cc = np.asarray(cols, dtype=np.int64)
    r = np.maximum(np.abs(rr), np.abs(cc))
    base = (2 * r - 1) ** 2
    along = np.select(
        [
            (rr == r) & (cc <= r - 1),
            (cc == -r) & (rr <= r - 1),
            (rr == -r) & (cc >= -r + 1),
        ],
        [
            (r - 1) - cc,
            2 * r + (r - 1 - rr),
            4 * r + cc + r - 1,
        ],
        default=6 * r + rr + r - 1,
    )
    return np.where(r == 0, 0, base + along)


def raster_index(rows: np.ndarray | int, cols: np.ndarray | int, width: int) -> np.ndarray:
    return np.asarray(rows, dtype=np.int64) * width + np.asarray(cols, dtype=np.int64)
