# services/weighting/kernels.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from services.errors import EmptyCandidateSetError, PreconditionError

LOG_2PI = math.log(2.0 * math.pi)


def gaussian_kernel(y: np.ndarray) -> float:
    """Standard p-variate Gaussian density at y."""
    v = np.asarray(y, dtype=np.float64).ravel()
    p = v.size
    return float((2.0 * math.pi) ** (-p / 2.0) * math.exp(-0.5 * float(v @ v)))


def scaled_kernel(y: np.ndarray, b: float) -> float:
    """K_b(y) = b^-p K(y / b)."""
    if b <= 0:
        raise PreconditionError(f"bandwidth must be > 0, got {b}")
    v = np.asarray(y, dtype=np.float64).ravel()
    return float(b ** (-v.size)) * gaussian_kernel(v / b)


def log_weight(diff: np.ndarray, b: float) -> float:
    """log K_b(diff), computed without forming the density."""
    v = np.asarray(diff, dtype=np.float64).ravel()
    return float(log_weights(np.array([v @ v]), v.size, b)[0])


def log_weights(squared_distances: np.ndarray, p: int, b: float) -> np.ndarray:
    """log K_b for many candidates from their squared euclidean distances."""
    if b <= 0:
        raise PreconditionError(f"bandwidth must be > 0, got {b}")
    sq = np.asarray(squared_distances, dtype=np.float64)
    return -0.5 * p * LOG_2PI - p * math.log(b) - sq / (2.0 * b * b)


@dataclass(frozen=True, eq=False)
class WeightVector:
    log_weights: np.ndarray
    probabilities: np.ndarray

    @property
    def size(self) -> int:
        return int(self.probabilities.size)

    def entropy(self) -> float:
        q = self.probabilities[self.probabilities > 0]
        return float(-(q * np.log(q)).sum())

    def effective_size(self) -> float:
        return float(1.0 / np.sum(self.probabilities**2))

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probabilities)


def sample_index(cdf: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw of one index from a cumulative weight array."""
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, cdf.size - 1)


def normalize_weights(log_w: np.ndarray) -> WeightVector:
    """
    Probabilities proportional to exp(log_w), shifted by the maximum first so
    the largest term is exp(0). Adding a constant to every entry changes nothing.
    """
    lw = np.asarray(log_w, dtype=np.float64)
    if lw.size == 0:
        raise EmptyCandidateSetError()
    if not np.isfinite(lw).any():
        raise PreconditionError("all log-weights are non-finite")
    shifted = np.exp(lw - lw.max())
    return WeightVector(lw, shifted / shifted.sum())
