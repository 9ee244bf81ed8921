import numpy as np
import pytest
from aqwm.dto import BitStream, LstmModel, PnKey, SignalFrame, TrainingSample
from pydantic import ValidationError


def test_signal_frame_copies_and_freezes():
    src = np.array([1.0, 2.0, 3.0])
    frame = SignalFrame(samples=src, sample_rate_hz=10.0)
    src[0] = 100.0

    assert frame.samples[0] == 1.0
    assert frame.samples.dtype == np.float64
    assert len(frame) == 3
    assert frame.duration_s == pytest.approx(0.3)
    with pytest.raises(ValueError):
        frame.samples[0] = 5.0


@pytest.mark.parametrize(
    "samples,rate",
    [
        ([], 10.0),
        ([1.0, float("nan")], 10.0),
        ([1.0, float("inf")], 10.0),
        ([[1.0, 2.0]], 10.0),
        ([1.0], 0.0),
        ([1.0], -1.0),
    ],
)
def test_signal_frame_invalid(samples, rate):
    with pytest.raises(ValidationError):
        SignalFrame(samples=samples, sample_rate_hz=rate)


def test_signal_frame_json():
    frame = SignalFrame(samples=[0.1, -0.2, 1e-300], sample_rate_hz=250.0)
    restored = SignalFrame.model_validate_json(frame.model_dump_json())

    assert restored == frame
    assert restored.samples.tolist() == [0.1, -0.2, 1e-300]


def test_sign_vectors():
    key = PnKey(chips=[1, -1, 1, 1])
    assert key.n == 4
    assert key.chips.dtype == np.int8
    assert key.seed is None

    with pytest.raises(ValidationError):
        PnKey(chips=[1])
    with pytest.raises(ValidationError):
        PnKey(chips=[1, 0, -1])
    with pytest.raises(ValidationError):
        BitStream(bits=[])
    with pytest.raises(ValidationError):
        BitStream(bits=[1, 2])


def test_array_model_equality():
    assert BitStream(bits=[1, -1]) == BitStream(bits=[1, -1])
    assert BitStream(bits=[1, -1]) != BitStream(bits=[-1, 1])
    assert BitStream(bits=[1, -1]) != BitStream(bits=[1, -1, 1])
    assert PnKey(chips=[1, -1], seed=1) != PnKey(chips=[1, -1], seed=2)


def test_training_sample_shapes():
    s = TrainingSample(inputs=np.zeros((4, 2)), targets=np.zeros((4, 1)))
    assert s.steps == 4
    assert s.weights is None

    with pytest.raises(ValidationError):
        TrainingSample(inputs=np.zeros((4, 2)), targets=np.zeros((3, 1)))
    with pytest.raises(ValidationError):
        TrainingSample(inputs=np.zeros((0, 2)), targets=np.zeros((0, 1)))
    with pytest.raises(ValidationError):
        TrainingSample(inputs=np.zeros((4, 2)), targets=np.zeros((4, 1)), weights=np.ones((4, 2)))
    with pytest.raises(ValidationError):
        TrainingSample(inputs=np.zeros((4, 2)), targets=np.zeros((4, 1)), weights=-np.ones((4, 1)))


def test_lstm_model_zeros():
    model = LstmModel.zeros(2, 3, 1)

    assert model.w_xi.shape == (3, 2)
    assert model.w_hf.shape == (3, 3)
    assert model.b_o.shape == (3,)
    assert model.w_hy.shape == (1, 3)
    assert len(LstmModel.parameter_names()) == 14


def test_lstm_model_bad_shape():
    data = LstmModel.zeros(2, 3, 1).model_dump()
    data["w_hg"] = np.zeros((3, 2)).tolist()

    with pytest.raises(ValidationError):
        LstmModel.model_validate(data)


def test_lstm_model_json_exact():
    model = LstmModel.zeros(2, 3, 1)
    model.w_xi[0, 0] = 0.1 + 0.2
    model.b_y[0] = -1.0 / 3.0

    restored = LstmModel.model_validate_json(model.model_dump_json())

    assert restored == model
    assert restored.w_xi[0, 0] == 0.1 + 0.2
