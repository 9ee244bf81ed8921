from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .arrays import ArrayModel, FrozenFloatVector
from .watermark import PnKey


class AttackKind(str, Enum):
    INJECTION = "injection"
    EAVESDROP_FORGE = "eavesdrop_forge"


class AttackConfig(BaseModel):
    """Adversary settings"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    kind: AttackKind

    start_sample: int = Field(0, ge=0)
    """First attacked sample, must sit on a window boundary"""

    injected_mean: float = 0.0
    """Mean of the injected (or forgery cover) samples"""

    injected_std: float = Field(1.0, ge=0)
    """Standard deviation of the injected (or forgery cover) samples"""

    eavesdrop_windows: int = Field(100, ge=1)
    """Number m of recorded windows the eavesdropper accumulates"""

    seed: int = Field(0, ge=0)

    forge_beta: Optional[float] = Field(None, gt=0)
    """Watermark amplitude of the forgery; defaults to the scheme's beta"""


class AccumulatedObservation(ArrayModel):
    """Element-wise sum of m recorded windows"""

    model_config = ConfigDict(frozen=True)

    sum_samples: FrozenFloatVector

    windows_summed: int = Field(..., ge=1)
    """m"""

    mean_window_variance: float = Field(..., ge=0, allow_inf_nan=False)
    """Mean of the per-window population variances of the recorded windows"""

    @field_validator("sum_samples")
    @classmethod
    def _validate_sum(cls, v):
        if v.size == 0:
            raise ValueError("accumulated window must not be empty")
        return v


class KeyEstimate(ArrayModel):
    """The eavesdropper's view of the key"""

    model_config = ConfigDict(frozen=True)

    chips: PnKey
    """Folded estimate of length n"""

    pattern: PnKey
    """Full-window chip pattern of length n * n_s, sign of the accumulated window"""

    power_ratio: float = Field(..., ge=0, allow_inf_nan=False)
    """Key-to-signal power proxy of the accumulated window"""
