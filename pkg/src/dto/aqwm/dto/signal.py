import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .arrays import ArrayModel, FrozenFloatVector


class SignalFrame(ArrayModel):
    """Fixed-rate window of real-valued samples (the carrier y)"""

    model_config = ConfigDict(frozen=True)

    samples: FrozenFloatVector
    """Samples in signal units, in time order"""

    sample_rate_hz: float = Field(..., gt=0, allow_inf_nan=False)
    """Sampling frequency f_s"""

    @field_validator("samples")
    @classmethod
    def _validate_samples(cls, v: np.ndarray) -> np.ndarray:
        if v.size == 0:
            raise ValueError("frame must contain at least one sample")
        return v

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "SignalFrame":
        """New frame at the same sample rate"""
        return SignalFrame(samples=samples, sample_rate_hz=self.sample_rate_hz)


class SignalStats(BaseModel):
    """Summary statistics of a frame"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mean: float
    """Arithmetic mean"""

    variance: float = Field(..., ge=0)
    """Population variance"""

    count: int = Field(..., ge=1)
    """Number of samples summarized"""


class ProductStats(BaseModel):
    """Mean and variance of the product of two signal realisations"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mean: float
    variance: float = Field(..., ge=0)
