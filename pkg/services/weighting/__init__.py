from services.weighting.kernels import (
    WeightVector,
    gaussian_kernel,
    log_weight,
    log_weights,
    normalize_weights,
    scaled_kernel,
)
from services.weighting.matching import (
    default_spatial_sigma,
    epsilon_match_set,
    patch_distance,
    spatial_weights,
)
from services.weighting.modes import KernelGaussian, UniformEpsilon, WeightingMode

__all__ = [
    "KernelGaussian",
    "UniformEpsilon",
    "WeightVector",
    "WeightingMode",
    "default_spatial_sigma",
    "epsilon_match_set",
    "gaussian_kernel",
    "log_weight",
    "log_weights",
    "normalize_weights",
    "patch_distance",
    "scaled_kernel",
    "spatial_weights",
]
