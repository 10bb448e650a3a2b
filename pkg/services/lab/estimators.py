# services/lab/estimators.py
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from services.errors import EmptyCandidateSetError
from services.field_core.field import Field
from services.field_core.patches import CandidateGrid, PatchVector
from services.weighting.kernels import log_weights, normalize_weights


def _candidate_log_weights(
    observed: Field, y: PatchVector, b: float
) -> tuple[CandidateGrid, np.ndarray]:
    grid = CandidateGrid.for_shape(observed, y.shape)
    if grid.is_empty:
        raise EmptyCandidateSetError()
    return grid, log_weights(grid.squared_distances(observed, y), y.p, b)


def kernel_conditional_cdf(observed: Field, x: float, y: PatchVector, b: float) -> float:
    """
    sum_t 1{X_t <= x} K_b(y - Y_t) / sum_s K_b(y - Y_s) over every anchor
    where the shape of y fits inside `observed`.
    """
    grid, lw = _candidate_log_weights(observed, y, b)
    probs = normalize_weights(lw).probabilities
    hit = grid.values(observed) <= x
    if hit.all():
        return 1.0
    return float(min(1.0, probs[hit].sum()))


def kernel_conditional_pmf(
    observed: Field, y: PatchVector, b: float, alphabet: np.ndarray
) -> np.ndarray:
    """Kernel estimate of P(X = a | Y = y) for each a in a finite alphabet."""
    grid, lw = _candidate_log_weights(observed, y, b)
    probs = normalize_weights(lw).probabilities
    idx = np.searchsorted(alphabet, grid.values(observed))
    return np.bincount(np.clip(idx, 0, alphabet.size - 1), weights=probs, minlength=alphabet.size)


def kernel_marginal_density(observed: Field, y: PatchVector, b: float) -> float:
    """Mean of K_b(y - Y_t) over candidate anchors (normalised by their count)."""
    grid, lw = _candidate_log_weights(observed, y, b)
    return float(math.exp(logsumexp(lw) - math.log(grid.size)))
