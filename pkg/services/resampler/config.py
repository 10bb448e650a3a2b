# services/resampler/config.py
from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from services.errors import ConfigError
from services.field_core.shapes import Canvas, Scheme
from services.settings import get_settings
from services.weighting.matching import default_spatial_sigma
from services.weighting.modes import KernelGaussian, UniformEpsilon, WeightingMode


class SynthesisConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: Scheme
    w: int = Field(ge=2)
    mode: WeightingMode
    out_height: int = Field(ge=1)
    out_width: int = Field(ge=1)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    # None -> w (corner, rectangular) or 2w - 1 (spiral)
    seed_side: int | None = Field(default=None, ge=1)
    poor_match_distance: float | None = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _fits_seed(self) -> SynthesisConfig:
        m = self.side
        if self.out_height < m or self.out_width < m:
            raise ValueError(
                f"output {self.out_height}x{self.out_width} smaller than the {m}x{m} seed"
            )
        return self

    @property
    def side(self) -> int:
        if self.seed_side is not None:
            return self.seed_side
        return self.scheme.default_seed_side(self.w)

    def canvas(self) -> Canvas:
        return Canvas(self.out_height, self.out_width, self.side, self.scheme)

    def spatial_sigma(self) -> float:
        if isinstance(self.mode, UniformEpsilon) and self.mode.spatial_sigma is not None:
            return self.mode.spatial_sigma
        return default_spatial_sigma(self.w, get_settings().synthesis.spatial_sigma_divisor)

    def with_bandwidth(self, b: float) -> SynthesisConfig:
        return self.model_copy(update={"mode": KernelGaussian(b=b)})


def build_config(**values: Any) -> SynthesisConfig:
    """SynthesisConfig from loose values; pydantic errors become ConfigError."""
    try:
        return SynthesisConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
