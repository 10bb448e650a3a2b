# services/weighting/matching.py
from __future__ import annotations

import numpy as np

from services.errors import EmptyCandidateSetError, PreconditionError, ShapeMismatchError
from services.field_core.patches import PatchVector
from services.field_core.shapes import Shape

SIGMA_DIVISOR = 6.4


def default_spatial_sigma(w: int, divisor: float = SIGMA_DIVISOR) -> float:
    return (2 * w - 1) / divisor


def spatial_weights(shape: Shape, spatial_sigma: float) -> np.ndarray:
    """g(o) = exp(-|o|^2 / (2 sigma^2)) in the shape's canonical order."""
    if spatial_sigma <= 0:
        raise PreconditionError(f"spatial sigma must be > 0, got {spatial_sigma}")
    sq = (shape.array**2).sum(axis=1).astype(np.float64)
    return np.exp(-sq / (2.0 * spatial_sigma * spatial_sigma))


def patch_distance(
    a: PatchVector, b: PatchVector, spatial_sigma: float, shape: Shape | None = None
) -> float:
    if a.shape != b.shape or (shape is not None and a.shape != shape):
        raise ShapeMismatchError("patch vectors have different shapes")
    g = spatial_weights(a.shape, spatial_sigma)
    diff = a.entries - b.entries
    return float(np.sum(g * diff * diff))


def epsilon_match_set(distances: np.ndarray, epsilon: float) -> np.ndarray:
    """
    Indices s with d(s) <= (1 + epsilon) * min d. When every distance is zero
    the set is every index.
    """
    if epsilon < 0:
        raise PreconditionError(f"epsilon must be >= 0, got {epsilon}")
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise EmptyCandidateSetError()
    return np.flatnonzero(d <= (1.0 + epsilon) * d.min())
