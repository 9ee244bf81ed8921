from typing import Annotated, List, Optional

from pydantic import ConfigDict, Field, model_validator
from pydantic.functional_validators import AfterValidator

from ._rg import DETECT_GROUP
from .document import DocumentSpecABC
from .document_registry import kind
from .validators import validate_probability
from .watermark import WatermarkParams


@kind(DETECT_GROUP, "report", "v1")
class DetectionReport(DocumentSpecABC):
    """Cloud-side verification outcome for a stream of windows"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    scheme: str
    """Verifier that produced the report"""

    params: WatermarkParams

    threshold: float = Field(..., gt=0, lt=1)

    per_window_mismatch: List[Annotated[float, AfterValidator(validate_probability)]]
    """Mismatch fraction of every received window, in window order"""

    alarm_window: Optional[int] = Field(None, ge=0)
    """First window whose mismatch exceeds the threshold"""

    alarm_time_s: Optional[float] = Field(None, ge=0)
    """End of the alarm window, (alarm_window + 1) * n * n_s / f_s"""

    @model_validator(mode="after")
    def _validate_alarm(self) -> "DetectionReport":
        expected = next((i for i, m in enumerate(self.per_window_mismatch) if m > self.threshold), None)
        if self.alarm_window != expected:
            raise ValueError(f"alarm_window must be the first window above threshold ({expected})")
        if (self.alarm_window is None) != (self.alarm_time_s is None):
            raise ValueError("alarm_time_s must be set exactly when alarm_window is set")
        if self.alarm_window is not None:
            t = alarm_time(self.alarm_window, self.params)
            if abs(self.alarm_time_s - t) > 1e-9 * max(1.0, t):
                raise ValueError(f"alarm_time_s must be {t}")
        return self

    @property
    def alarm(self) -> bool:
        return self.alarm_window is not None


def alarm_time(alarm_window: int, params: WatermarkParams) -> float:
    """Time at which the alarm window has been fully received"""
    return (alarm_window + 1) * params.window_len / params.sample_rate_hz
