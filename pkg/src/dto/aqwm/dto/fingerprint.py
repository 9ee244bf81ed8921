from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._rg import FINGERPRINT_GROUP
from .document import DocumentSpecABC
from .document_registry import kind
from .validators import validate_non_decreasing

FEATURE_ORDER: Tuple[str, ...] = ("spectral_flatness", "mean", "variance", "skewness", "kurtosis")
"""Fixed feature order used for quantization, model outputs and the calibration document"""


class FeatureVector(BaseModel):
    """Stochastic fingerprint of one window"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    spectral_flatness: float = Field(..., ge=0, le=1)
    mean: float
    variance: float = Field(..., ge=0)
    skewness: float
    kurtosis: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_ORDER], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "FeatureVector":
        if len(values) != len(FEATURE_ORDER):
            raise ValueError(f"expected {len(FEATURE_ORDER)} feature values, got {len(values)}")
        return cls(**{name: float(v) for name, v in zip(FEATURE_ORDER, values)})


@kind(FINGERPRINT_GROUP, "calibration", "v1")
class FeatureCalibration(DocumentSpecABC):
    """Feature-to-bit mapping shared between device and cloud"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    feature_order: Tuple[str, ...] = FEATURE_ORDER
    """Feature order the per-feature lists follow"""

    centers: List[float]
    """Per-feature median over the calibration frames"""

    spreads: List[float]
    """Per-feature interquartile range, floored at 1e-9"""

    thresholds: List[List[float]]
    """Per-feature cut points at equiprobable quantiles"""

    bits_per_feature: int = Field(1, ge=1)

    @field_validator("feature_order")
    @classmethod
    def _validate_feature_order(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if tuple(v) != FEATURE_ORDER:
            raise ValueError(f"unsupported feature order {v}, expected {FEATURE_ORDER}")
        return tuple(v)

    @field_validator("spreads")
    @classmethod
    def _validate_spreads(cls, v: List[float]) -> List[float]:
        if any(s <= 0 for s in v):
            raise ValueError("spreads must be positive")
        return v

    @model_validator(mode="after")
    def _validate_shapes(self) -> "FeatureCalibration":
        n_features = len(FEATURE_ORDER)
        if len(self.centers) != n_features or len(self.spreads) != n_features or len(self.thresholds) != n_features:
            raise ValueError(f"centers, spreads and thresholds need one entry per feature ({n_features})")
        for cuts in self.thresholds:
            if len(cuts) != self.bits_per_feature:
                raise ValueError(f"expected {self.bits_per_feature} thresholds per feature, got {len(cuts)}")
            validate_non_decreasing(cuts)
        return self

    @property
    def code_length(self) -> int:
        return self.bits_per_feature * len(FEATURE_ORDER)
