from enum import Enum
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ._rg import HARNESS_GROUP
from .arrays import ArrayModel
from .detect import DetectionReport
from .document import DocumentSpecABC
from .document_registry import kind
from .signal import SignalFrame
from .threat import AttackConfig, AttackKind
from .watermark import WatermarkParams


class SchemeMode(str, Enum):
    STATIC = "static"
    DYNAMIC_ORACLE = "dynamic_oracle"
    DYNAMIC_LSTM = "dynamic_lstm"


class SyntheticSource(BaseModel):
    """Seeded Gaussian carrier"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    type: Literal["synthetic"] = "synthetic"
    mean: float = 0.0
    std: float = Field(1.0, ge=0)
    seed: int = Field(0, ge=0)


class CsvSource(BaseModel):
    """Single-column CSV recording"""

    model_config = ConfigDict(frozen=True)

    type: Literal["csv"] = "csv"
    path: str
    column_name: Optional[str] = None
    """Informational only, the file holds one column"""


SignalSource = Annotated[Union[SyntheticSource, CsvSource], Field(discriminator="type")]


class CalibrationSettings(BaseModel):
    """How the fingerprint calibration of the dynamic schemes is built"""

    model_config = ConfigDict(frozen=True)

    windows: int = Field(200, ge=10)
    """Number of clean calibration windows"""

    bits_per_feature: int = Field(1, ge=1)

    seed: int = Field(0, ge=0)
    """Seed of the calibration carrier (synthetic sources only)"""


@kind(HARNESS_GROUP, "scenario", "v1")
class Scenario(DocumentSpecABC):
    """One reproducible device-to-cloud experiment"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    name: str = "scenario"
    mode: SchemeMode
    params: WatermarkParams
    source: SignalSource = Field(default_factory=SyntheticSource)
    attack: Optional[AttackConfig] = None

    duration_s: float = Field(..., gt=0)
    """Stream length, a whole number of windows"""

    threshold: float = Field(0.25, gt=0, lt=1)

    key_seed: int = Field(0, ge=0)

    bits_seed: int = Field(0, ge=0)
    """Seed of the static bit stream when static_bits is not given"""

    static_bits: Optional[List[int]] = None
    """Explicit static bit stream, length n_s"""

    calibration: CalibrationSettings = Field(default_factory=CalibrationSettings)

    erasure_margin: float = Field(0.0, ge=0)
    """Soft bits closer to zero than this count as mismatches"""

    device_id: int = Field(1, ge=0, lt=2**32)

    transport: bool = True
    """Pass every window through the wire codec"""

    encoder_path: Optional[str] = None
    decoder_path: Optional[str] = None

    power_ratio_windows: List[int] = Field(default_factory=lambda: [1, 10, 100])
    """Accumulation sizes m of the reported power-ratio curve"""

    @field_validator("power_ratio_windows")
    @classmethod
    def _validate_power_ratio_windows(cls, v: List[int]) -> List[int]:
        if any(m < 1 for m in v):
            raise ValueError("accumulation sizes must be positive")
        return v

    @model_validator(mode="after")
    def _validate_scenario(self) -> "Scenario":
        total = self.duration_s * self.params.sample_rate_hz
        windows = total / self.params.window_len
        if windows < 1 or abs(windows - round(windows)) > 1e-9 * max(1.0, windows):
            raise ValueError(
                f"duration_s * sample_rate_hz = {total} samples is not a whole number of "
                f"{self.params.window_len}-sample windows"
            )
        if self.attack is not None and self.attack.start_sample % self.params.window_len != 0:
            raise ValueError(f"attack.start_sample must be a multiple of the window length {self.params.window_len}")
        if self.static_bits is not None:
            if len(self.static_bits) != self.params.n_s:
                raise ValueError(f"static_bits must have n_s = {self.params.n_s} entries")
            if any(b not in (1, -1) for b in self.static_bits):
                raise ValueError("static_bits entries must be +1 or -1")
        if self.mode == SchemeMode.DYNAMIC_LSTM and (self.encoder_path is None or self.decoder_path is None):
            raise ValueError("dynamic_lstm scenarios need encoder_path and decoder_path")
        if (
            self.attack is not None
            and self.attack.kind == AttackKind.EAVESDROP_FORGE
            and self.attack.start_sample < self.params.window_len
        ):
            raise ValueError("eavesdrop_forge attacks need at least one recorded window before start_sample")
        return self

    @property
    def window_count(self) -> int:
        return int(round(self.duration_s * self.params.sample_rate_hz / self.params.window_len))

    @property
    def sample_count(self) -> int:
        return self.window_count * self.params.window_len


class WireFrame(ArrayModel):
    """Decoded device-to-cloud frame"""

    model_config = ConfigDict(frozen=True)

    device_id: int = Field(..., ge=0, lt=2**32)
    window_index: int = Field(..., ge=0, lt=2**64)
    n: int = Field(..., ge=1, lt=2**16)
    n_s: int = Field(..., ge=1, lt=2**16)
    sample_rate_hz: float = Field(..., gt=0)
    frame: SignalFrame

    @model_validator(mode="after")
    def _validate_payload(self) -> "WireFrame":
        if len(self.frame) != self.n * self.n_s:
            raise ValueError(f"frame holds {len(self.frame)} samples, expected n * n_s = {self.n * self.n_s}")
        return self


class BerPoint(BaseModel):
    """Empirical and closed-form bit error rate at one operating point"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    beta_over_sigma: float = Field(..., ge=0)
    n: int = Field(..., ge=1)
    empirical_ber: float = Field(..., ge=0, le=1)
    theoretical_ber: float = Field(..., ge=0, le=0.5)
    bits: int = Field(..., ge=0)
    """Number of extracted bits behind empirical_ber"""


class SchemeBerPoint(BaseModel):
    """Static against dynamic extraction error on shared carriers"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    beta_over_sigma: float = Field(..., gt=0)
    n: int = Field(..., ge=2)
    static_ber: float = Field(..., ge=0, le=1)
    dynamic_ber: float = Field(..., ge=0, le=1)
    bits: int = Field(..., ge=1)


class PowerRatioPoint(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    m: int = Field(..., ge=1)
    ratio: float = Field(..., ge=0)


@kind(HARNESS_GROUP, "metrics", "v1")
class MetricsBundle(DocumentSpecABC):
    """Metrics of a scenario run or a sweep"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    scenario: Optional[str] = None
    mode: Optional[SchemeMode] = None
    ber_points: List[BerPoint] = Field(default_factory=list)
    scheme_ber_points: List[SchemeBerPoint] = Field(default_factory=list)
    detection: Optional[DetectionReport] = None
    power_ratio_curve: List[PowerRatioPoint] = Field(default_factory=list)

    runtime_s: float = Field(0.0, ge=0)
    """Wall-clock runtime, excluded from reproducibility comparisons"""

    def deterministic_json(self) -> str:
        """JSON dump without the runtime field"""
        return self.model_dump_json(exclude={"runtime_s"})
