from services.resampler.config import SynthesisConfig, build_config
from services.resampler.engine import (
    SynthesisReport,
    SynthesisState,
    bandwidth_sweep,
    place_seed,
    scheme_ordering,
    synthesize,
    synthesize_pixel,
    synthesize_with_report,
)

__all__ = [
    "SynthesisConfig",
    "SynthesisReport",
    "SynthesisState",
    "bandwidth_sweep",
    "build_config",
    "place_seed",
    "scheme_ordering",
    "synthesize",
    "synthesize_pixel",
    "synthesize_with_report",
]
