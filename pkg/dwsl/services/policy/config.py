"""
Algorithm hyperparameters for policy extraction.
"""

from typing import Optional

from pydantic import Field, field_validator

from dwsl.config import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_CLIP,
    DEFAULT_EXPECTILE,
    DWSL_B_POLYAK,
    DWSL_B_TARGET_PERIOD,
)
from dwsl.services.nn import FitConfig


class TrainConfig(FitConfig):
    """
    Temperatures, weight clipping and optimisation settings.

    ``alpha`` is the soft-minimum temperature in normalised distance space,
    ``beta`` the advantage temperature. ``clip=None`` disables clipping.
    """

    alpha: float = Field(DEFAULT_ALPHA, gt=0)
    beta: float = Field(DEFAULT_BETA, gt=0)
    clip: Optional[float] = DEFAULT_CLIP
    expectile: float = Field(DEFAULT_EXPECTILE, gt=0.5, lt=1.0)
    target_update_period: int = Field(DWSL_B_TARGET_PERIOD, ge=1)
    polyak: float = Field(DWSL_B_POLYAK, gt=0, le=1)

    @field_validator("clip")
    @classmethod
    def _clip_at_least_one(cls, value):
        if value is not None and value < 1:
            raise ValueError("clip must be at least 1")
        return value
