from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import ArrayModel, SignVector


class PnKey(ArrayModel):
    """Shared +1/-1 pseudo-noise key"""

    model_config = ConfigDict(frozen=True)

    chips: SignVector
    """Key chips, one per sample of a bit span"""

    seed: Optional[int] = None
    """Seed the key was generated from, unset for estimated keys"""

    @field_validator("chips")
    @classmethod
    def _validate_chips(cls, v: np.ndarray) -> np.ndarray:
        if v.size < 2:
            raise ValueError("key needs at least two chips")
        return v

    @property
    def n(self) -> int:
        return int(self.chips.shape[0])

    def __len__(self) -> int:
        return self.n


class BitStream(ArrayModel):
    """Hidden +1/-1 bit stream of one window"""

    model_config = ConfigDict(frozen=True)

    bits: SignVector

    @field_validator("bits")
    @classmethod
    def _validate_bits(cls, v: np.ndarray) -> np.ndarray:
        if v.size < 1:
            raise ValueError("bit stream needs at least one bit")
        return v

    @property
    def n_s(self) -> int:
        return int(self.bits.shape[0])

    def __len__(self) -> int:
        return self.n_s


class WatermarkParams(BaseModel):
    """Watermark amplitude and window geometry"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    beta: float = Field(..., gt=0)
    """Watermark amplitude in signal units"""

    n: int = Field(..., ge=2)
    """Chips per bit"""

    n_s: int = Field(..., ge=1)
    """Bits per window"""

    sample_rate_hz: float = Field(..., gt=0)
    """Sampling frequency f_s"""

    @property
    def window_len(self) -> int:
        """Embedding period in samples"""
        return self.n * self.n_s

    @property
    def window_s(self) -> float:
        return self.window_len / self.sample_rate_hz


class SoftBit(BaseModel):
    """Correlator output for one bit"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    value: float
    hard: int

    @model_validator(mode="after")
    def _validate_hard(self) -> "SoftBit":
        if self.hard != (1 if self.value >= 0 else -1):
            raise ValueError(f"hard bit {self.hard} inconsistent with soft value {self.value}")
        return self

    @classmethod
    def from_value(cls, value: float) -> "SoftBit":
        # a zero correlation resolves to +1
        return cls(value=value, hard=1 if value >= 0 else -1)


class PlannerMode(str, Enum):
    """How the planner reads the attacker-error constraint"""

    STRICT = "strict"
    """attacker_ber >= 1 - p_under"""

    CONFUSION = "confusion"
    """attacker_ber >= 0.5 - p_under"""
