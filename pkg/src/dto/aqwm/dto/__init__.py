from .arrays import ArrayModel, FloatMatrix, FloatVector, FrozenFloatVector, SignVector
from .detect import DetectionReport, alarm_time
from .document import DocumentDto, DocumentSpecABC
from .document_registry import DEFAULT_DOCUMENT_REGISTRY, DocumentRegistry, DocumentRegistryEntry, kind
from .fingerprint import FEATURE_ORDER, FeatureCalibration, FeatureVector
from .harness import (
    BerPoint,
    CalibrationSettings,
    CsvSource,
    MetricsBundle,
    PowerRatioPoint,
    Scenario,
    SchemeBerPoint,
    SchemeMode,
    SignalSource,
    SyntheticSource,
    WireFrame,
)
from .lstm import GATES, LstmModel, LstmRole, TrainConfig, TrainingSample, TrainReport
from .metadata import Metadata
from .signal import ProductStats, SignalFrame, SignalStats
from .threat import AccumulatedObservation, AttackConfig, AttackKind, KeyEstimate
from .watermark import BitStream, PlannerMode, PnKey, SoftBit, WatermarkParams
