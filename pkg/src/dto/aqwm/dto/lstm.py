from enum import Enum
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ._rg import LSTM_GROUP
from .arrays import ArrayModel, FloatMatrix, FloatVector
from .document import DocumentSpecABC
from .document_registry import kind
from .fingerprint import FeatureCalibration

GATES = ("i", "f", "g", "o")
"""Gate order: input, forget, cell candidate, output"""


class LstmRole(str, Enum):
    GENERIC = "generic"
    ENCODER = "encoder"
    DECODER = "decoder"


@kind(LSTM_GROUP, "model", "v1")
class LstmModel(DocumentSpecABC, ArrayModel):
    """Single-layer LSTM with an affine output projection at every step.

    The model is mutable: training updates the weight arrays in place.
    """

    input_dim: int = Field(..., ge=1)
    hidden_dim: int = Field(..., ge=1)
    output_dim: int = Field(..., ge=1)

    role: LstmRole = LstmRole.GENERIC
    """What the network was trained for"""

    signal_scale: float = Field(1.0, gt=0, allow_inf_nan=False)
    """Signal samples are divided by this before entering the network, outputs are multiplied by it"""

    n: Optional[int] = Field(None, ge=2)
    """Chips per bit the model was trained for"""

    n_s: Optional[int] = Field(None, ge=1)
    """Bits per window the model was trained for"""

    calibration: Optional[FeatureCalibration] = None
    """Encoder only: the feature calibration the per-span fingerprint bit input is derived from"""

    w_xi: FloatMatrix
    w_xf: FloatMatrix
    w_xg: FloatMatrix
    w_xo: FloatMatrix
    w_hi: FloatMatrix
    w_hf: FloatMatrix
    w_hg: FloatMatrix
    w_ho: FloatMatrix
    b_i: FloatVector
    b_f: FloatVector
    b_g: FloatVector
    b_o: FloatVector
    w_hy: FloatMatrix
    b_y: FloatVector

    @model_validator(mode="after")
    def _validate_shapes(self) -> "LstmModel":
        d, h, o = self.input_dim, self.hidden_dim, self.output_dim
        for gate in GATES:
            for prefix, shape in (("w_x", (h, d)), ("w_h", (h, h)), ("b_", (h,))):
                name = f"{prefix}{gate}"
                if getattr(self, name).shape != shape:
                    raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if self.w_hy.shape != (o, h):
            raise ValueError(f"w_hy has shape {self.w_hy.shape}, expected {(o, h)}")
        if self.b_y.shape != (o,):
            raise ValueError(f"b_y has shape {self.b_y.shape}, expected {(o,)}")
        return self

    @classmethod
    def zeros(cls, input_dim: int, hidden_dim: int, output_dim: int, **kwargs) -> "LstmModel":
        """All-zero parameters of the given dimensions"""
        weights = {}
        for gate in GATES:
            weights[f"w_x{gate}"] = np.zeros((hidden_dim, input_dim))
            weights[f"w_h{gate}"] = np.zeros((hidden_dim, hidden_dim))
            weights[f"b_{gate}"] = np.zeros(hidden_dim)
        weights["w_hy"] = np.zeros((output_dim, hidden_dim))
        weights["b_y"] = np.zeros(output_dim)
        return cls(input_dim=input_dim, hidden_dim=hidden_dim, output_dim=output_dim, **weights, **kwargs)

    @staticmethod
    def parameter_names() -> List[str]:
        names = [f"{prefix}{gate}" for prefix in ("w_x", "w_h", "b_") for gate in GATES]
        return names + ["w_hy", "b_y"]


class TrainConfig(BaseModel):
    """Gradient descent settings"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    epochs: int = Field(..., ge=1)
    learning_rate: float = Field(..., gt=0)
    seed: int = Field(0, ge=0)
    """Seed for fresh initialization and for the order samples are stacked in"""

    loss: Literal["mse"] = "mse"

    gradient_clip: Optional[float] = Field(1.0, gt=0)
    """Global gradient-norm clip, None disables clipping"""

    early_stop_loss: Optional[float] = Field(None, ge=0)
    """Stop as soon as an epoch loss is at or below this value"""

    log_every: int = Field(50, ge=1)


class TrainReport(BaseModel):
    """Loss history of one training run"""

    epoch_losses: List[float]
    final_loss: float = Field(..., ge=0)
    epochs_run: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _validate_history(self) -> "TrainReport":
        if self.epochs_run != len(self.epoch_losses):
            raise ValueError("epochs_run must equal the number of recorded losses")
        if self.epoch_losses and self.final_loss != self.epoch_losses[-1]:
            raise ValueError("final_loss must equal the last epoch loss")
        if any(loss < 0 for loss in self.epoch_losses):
            raise ValueError("losses must be non-negative")
        return self


class TrainingSample(ArrayModel):
    """One (inputs, targets) sequence pair"""

    inputs: FloatMatrix
    """(steps, input_dim)"""

    targets: FloatMatrix
    """(steps, output_dim)"""

    weights: Optional[FloatMatrix] = None
    """Per-element loss weights, same shape as targets; defaults to all ones"""

    @model_validator(mode="after")
    def _validate_shapes(self) -> "TrainingSample":
        if self.inputs.shape[0] == 0:
            raise ValueError("sequence must not be empty")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(f"inputs have {self.inputs.shape[0]} steps but targets have {self.targets.shape[0]}")
        if self.weights is not None:
            if self.weights.shape != self.targets.shape:
                raise ValueError(f"weights shape {self.weights.shape} differs from targets {self.targets.shape}")
            if np.any(self.weights < 0):
                raise ValueError("weights must be non-negative")
        return self

    @property
    def steps(self) -> int:
        return int(self.inputs.shape[0])
