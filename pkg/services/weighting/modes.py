# services/weighting/modes.py
from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class KernelGaussian(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["kernel"] = "kernel"
    b: float = Field(gt=0.0)


class UniformEpsilon(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform"] = "uniform"
    epsilon: float = Field(ge=0.0)
    # None -> (2w - 1) / 6.4
    spatial_sigma: float | None = Field(default=None, gt=0.0)


WeightingMode = Annotated[Union[KernelGaussian, UniformEpsilon], Field(discriminator="kind")]
