"""Single-layer LSTM written against numpy, with backpropagation through time.

Gate pre-activations are stacked in the order input, forget, cell candidate, output. Hidden and cell state start
at zero and an affine projection produces an output at every step. Training is full-batch gradient descent on a
(weighted) mean squared error with optional global gradient-norm clipping.

The same network realises the device encoder (input ``(y / scale, chip, bit)``, output the watermark term) and the
cloud decoder (input ``(w / scale, chip)``, output a per-step bit channel).
"""

import logging
import math
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from aqwm.dto import (
    GATES,
    BitStream,
    FeatureCalibration,
    FeatureVector,
    LstmModel,
    LstmRole,
    PnKey,
    SignalFrame,
    TrainConfig,
    TrainingSample,
    TrainReport,
    WatermarkParams,
)

from .exc import InvalidArgumentError, ShapeError, TrainingDivergedError
from .fingerprint import features, fingerprint_bits
from .rng import make_rng
from .sswm import embed, hard_bits, project_out_key

LOG = logging.getLogger(__name__)

ENCODER_INPUTS = 3
DECODER_INPUTS = 2
DECODER_OUTPUTS = 1
DEFAULT_HIDDEN = 32


class _Params(NamedTuple):
    wx: np.ndarray  # (4H, D)
    wh: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)
    why: np.ndarray  # (O, H)
    by: np.ndarray  # (O,)


def _pack(weights: Dict[str, np.ndarray], dtype=np.float64) -> _Params:
    return _Params(
        wx=np.concatenate([weights[f"w_x{g}"] for g in GATES]).astype(dtype),
        wh=np.concatenate([weights[f"w_h{g}"] for g in GATES]).astype(dtype),
        b=np.concatenate([weights[f"b_{g}"] for g in GATES]).astype(dtype),
        why=np.asarray(weights["w_hy"], dtype=dtype),
        by=np.asarray(weights["b_y"], dtype=dtype),
    )


def _unpack(p: _Params) -> Dict[str, np.ndarray]:
    h = p.wh.shape[1]
    out = {}
    for k, g in enumerate(GATES):
        rows = slice(k * h, (k + 1) * h)
        out[f"w_x{g}"] = p.wx[rows]
        out[f"w_h{g}"] = p.wh[rows]
        out[f"b_{g}"] = p.b[rows]
    out["w_hy"] = p.why
    out["b_y"] = p.by
    return out


def _weights(model: LstmModel) -> Dict[str, np.ndarray]:
    return {name: getattr(model, name) for name in LstmModel.parameter_names()}


def _sigmoid(a: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def _forward(p: _Params, x: np.ndarray, keep_cache: bool = False) -> Tuple[np.ndarray, list]:
    """x: (B, T, D) -> outputs (B, T, O)"""
    batch, steps, _ = x.shape
    hidden = p.wh.shape[1]
    h = np.zeros((batch, hidden), dtype=p.wh.dtype)
    c = np.zeros((batch, hidden), dtype=p.wh.dtype)
    ys = np.empty((batch, steps, p.why.shape[0]), dtype=p.wh.dtype)
    cache = []
    for t in range(steps):
        x_t = x[:, t]
        a = x_t @ p.wx.T + h @ p.wh.T + p.b
        i = _sigmoid(a[:, :hidden])
        f = _sigmoid(a[:, hidden : 2 * hidden])
        g = np.tanh(a[:, 2 * hidden : 3 * hidden])
        o = _sigmoid(a[:, 3 * hidden :])
        c_next = f * c + i * g
        tc = np.tanh(c_next)
        h_next = o * tc
        ys[:, t] = h_next @ p.why.T + p.by
        if keep_cache:
            cache.append((x_t, h, c, i, f, g, o, tc, h_next))
        h, c = h_next, c_next
    return ys, cache


def _backward(p: _Params, dy: np.ndarray, cache: list) -> _Params:
    """Gradients of the loss given dL/dy of shape (B, T, O)"""
    hidden = p.wh.shape[1]
    grads = _Params(*(np.zeros_like(a) for a in p))
    dh_next = np.zeros((dy.shape[0], hidden))
    dc_next = np.zeros((dy.shape[0], hidden))
    for t in reversed(range(dy.shape[1])):
        x_t, h_prev, c_prev, i, f, g, o, tc, h = cache[t]
        dy_t = dy[:, t]
        grads.why[...] += dy_t.T @ h
        grads.by[...] += dy_t.sum(axis=0)
        dh = dy_t @ p.why + dh_next
        do = dh * tc
        dc = dh * o * (1.0 - tc * tc) + dc_next
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_next = dc * f
        da = np.concatenate([di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g * g), do * o * (1.0 - o)], axis=1)
        grads.wx[...] += da.T @ x_t
        grads.wh[...] += da.T @ h_prev
        grads.b[...] += da.sum(axis=0)
        dh_next = da @ p.wh
    return grads


class _Batch(NamedTuple):
    inputs: np.ndarray
    targets: np.ndarray
    weights: np.ndarray


def _check_sample(model: LstmModel, sample: TrainingSample) -> None:
    if sample.inputs.shape[1] != model.input_dim:
        raise ShapeError(f"sample inputs have dimension {sample.inputs.shape[1]}, model expects {model.input_dim}")
    if sample.targets.shape[1] != model.output_dim:
        raise ShapeError(f"sample targets have dimension {sample.targets.shape[1]}, model emits {model.output_dim}")


def _batches(model: LstmModel, dataset: Sequence[TrainingSample]) -> Tuple[List[_Batch], float]:
    groups: Dict[int, List[TrainingSample]] = {}
    for sample in dataset:
        _check_sample(model, sample)
        groups.setdefault(sample.steps, []).append(sample)

    batches = []
    total = 0.0
    for steps in sorted(groups):
        group = groups[steps]
        weights = np.stack([s.weights if s.weights is not None else np.ones_like(s.targets) for s in group])
        batches.append(
            _Batch(
                inputs=np.stack([s.inputs for s in group]),
                targets=np.stack([s.targets for s in group]),
                weights=weights,
            )
        )
        total += float(weights.sum())
    return batches, total


def _loss_and_grads(p: _Params, batches: List[_Batch], total: float) -> Tuple[float, _Params]:
    grads = _Params(*(np.zeros_like(a) for a in p))
    if total <= 0:
        return 0.0, grads
    loss = 0.0
    for batch in batches:
        ys, cache = _forward(p, batch.inputs, keep_cache=True)
        err = ys - batch.targets
        loss += float(np.sum(batch.weights * err * err))
        dy = 2.0 * batch.weights * err / total
        for acc, g in zip(grads, _backward(p, dy, cache)):
            acc += g
    return loss / total, grads


def init_model(
    input_dim: int,
    hidden_dim: int,
    output_dim: int,
    seed: int,
    role: LstmRole = LstmRole.GENERIC,
    **kwargs,
) -> LstmModel:
    """Fresh model, weights uniform in +-1/sqrt(hidden_dim), forget-gate bias 1"""
    rng = make_rng(seed)
    bound = 1.0 / math.sqrt(hidden_dim)
    model = LstmModel.zeros(input_dim, hidden_dim, output_dim, role=role, **kwargs)
    for name in LstmModel.parameter_names():
        arr = getattr(model, name)
        arr[...] = rng.uniform(-bound, bound, arr.shape)
    model.b_f[...] = 1.0
    return model


def lstm_forward(model: LstmModel, inputs) -> np.ndarray:
    """Outputs at every step for one input sequence of shape (steps, input_dim)"""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] != model.input_dim:
        raise ShapeError(f"expected a non-empty (steps, {model.input_dim}) input sequence, got shape {x.shape}")
    ys, _ = _forward(_pack(_weights(model)), x[None])
    return ys[0]


def lstm_forward_batch(model: LstmModel, inputs: np.ndarray) -> np.ndarray:
    """Outputs for stacked equal-length sequences of shape (batch, steps, input_dim)"""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 3 or x.shape[1] == 0 or x.shape[2] != model.input_dim:
        raise ShapeError(f"expected a (batch, steps, {model.input_dim}) input array, got shape {x.shape}")
    ys, _ = _forward(_pack(_weights(model)), x)
    return ys


def gradient_check(model: LstmModel, sample: TrainingSample, epsilon: float = 1e-6) -> float:
    """Largest relative difference between BPTT and central finite-difference gradients

    The finite differences are evaluated in extended precision so that their rounding noise stays well below the
    analytic float64 gradient.

    Returns:
        max over all parameters of ``|g_a - g_n| / max(|g_a|, |g_n|, 1e-12)``
    """
    if not 1e-8 <= epsilon <= 1e-3:
        raise InvalidArgumentError(f"must lie in [1e-8, 1e-3], got {epsilon}", field="epsilon")
    batches, total = _batches(model, [sample])
    _, grads = _loss_and_grads(_pack(_weights(model)), batches, total)
    analytic = _unpack(grads)

    ext = np.longdouble
    batch = batches[0]
    x, t, w = (a.astype(ext) for a in batch)
    eps = ext(epsilon)
    params = {name: arr.astype(ext) for name, arr in _weights(model).items()}

    def loss() -> ext:
        if total <= 0:
            return ext(0)
        ys, _ = _forward(_pack(params, dtype=ext), x)
        err = ys - t
        return np.sum(w * err * err) / ext(total)

    worst = 0.0
    for name, arr in params.items():
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + eps
            plus = loss()
            arr[idx] = orig - eps
            minus = loss()
            arr[idx] = orig
            numeric = float((plus - minus) / (2 * eps))
            exact = float(analytic[name][idx])
            rel = abs(exact - numeric) / max(abs(exact), abs(numeric), 1e-12)
            worst = max(worst, rel)
    LOG.debug("gradient check: max relative error %.3g", worst)
    return worst


def _apply(weights: Dict[str, np.ndarray], grads: _Params, cfg: TrainConfig) -> None:
    step = cfg.learning_rate
    if cfg.gradient_clip is not None:
        norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
        if norm > cfg.gradient_clip:
            step *= cfg.gradient_clip / norm
    for name, g in _unpack(grads).items():
        weights[name] -= step * g


def _check_finite(epoch: int, loss: float, grads: _Params) -> None:
    if not math.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
        LOG.error("training diverged at epoch %d (loss %s)", epoch, loss)
        raise TrainingDivergedError(epoch)


def lstm_train(model: LstmModel, dataset: Sequence[TrainingSample], cfg: TrainConfig) -> TrainReport:
    """Full-batch gradient descent on the (weighted) MSE, updating ``model`` in place

    The samples are stacked in an order drawn from ``cfg.seed``, which fixes the summation order of the loss and
    gradient; two runs with the same model, data and config agree bitwise.

    Raises:
        TrainingDivergedError: the loss or its gradient stopped being finite
    """
    if not dataset:
        raise InvalidArgumentError("dataset is empty", field="dataset")
    order = make_rng(cfg.seed).permutation(len(dataset))
    batches, total = _batches(model, [dataset[i] for i in order])
    weights = _weights(model)
    losses: List[float] = []

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.epochs + 1):
            loss, grads = _loss_and_grads(_pack(weights), batches, total)
            _check_finite(epoch, loss, grads)
            losses.append(loss)
            if epoch % cfg.log_every == 0 or epoch == 1:
                LOG.info("epoch %d/%d loss %.6g", epoch, cfg.epochs, loss)
            else:
                LOG.debug("epoch %d/%d loss %.6g", epoch, cfg.epochs, loss)
            if cfg.early_stop_loss is not None and loss <= cfg.early_stop_loss:
                LOG.info("early stop at epoch %d, loss %.6g", epoch, loss)
                break

            _apply(weights, grads, cfg)

    return TrainReport(epoch_losses=losses, final_loss=losses[-1], epochs_run=len(losses))


def network_inputs(samples: np.ndarray, key: PnKey, scale: float) -> np.ndarray:
    """Per-step decoder inputs ``(sample / scale, chip)``, the key cycled with period n"""
    samples = np.asarray(samples, dtype=np.float64)
    chips = np.resize(key.chips.astype(np.float64), samples.shape[-1])
    chips = np.broadcast_to(chips, samples.shape)
    return np.stack([samples / scale, chips], axis=-1)


def encoder_inputs(samples: np.ndarray, key: PnKey, bits: np.ndarray, scale: float) -> np.ndarray:
    """Per-step encoder inputs ``(sample / scale, chip, bit)``, each bit held for its n-chip span"""
    x = network_inputs(samples, key, scale)
    held = np.repeat(np.asarray(bits, dtype=np.float64), key.n, axis=-1)
    if held.shape != x.shape[:-1]:
        raise ShapeError(f"{held.shape[-1]} bit-span samples do not cover a frame of {x.shape[-2]} samples")
    return np.concatenate([x, held[..., None]], axis=-1)


def _check_role(model: LstmModel, key: PnKey, frame_len: int, input_dim: int, output_dim: int) -> int:
    if model.input_dim != input_dim or model.output_dim != output_dim:
        raise ShapeError(
            f"model maps {model.input_dim} -> {model.output_dim} channels, expected {input_dim} -> {output_dim}"
        )
    if model.n is not None and model.n != key.n:
        raise ShapeError(f"model was trained for n = {model.n}, key has {key.n} chips")
    if model.n is not None and model.n_s is not None and frame_len != model.n * model.n_s:
        raise ShapeError(f"frame has {frame_len} samples, model expects n * n_s = {model.n * model.n_s}")
    n_s = model.n_s if model.n_s is not None else frame_len // key.n
    if n_s < 1 or n_s * key.n != frame_len:
        raise ShapeError(f"frame of {frame_len} samples does not split into {key.n}-chip spans")
    return n_s


def device_encode(model: LstmModel, y: SignalFrame, key: PnKey) -> SignalFrame:
    """Watermark a window with a trained encoder, ``w = y + scale * output``

    The encoder is fed the window's fingerprint bits, computed from the calibration it carries; a causal network
    has no other way to know window-level features at the first sample.
    """
    n_s = _check_role(model, key, len(y), ENCODER_INPUTS, 1)
    if model.calibration is None:
        raise InvalidArgumentError("encoder carries no feature calibration", field="calibration")
    bits = fingerprint_bits(y, key, model.calibration, n_s)
    out = lstm_forward(model, encoder_inputs(y.samples, key, bits.bits, model.signal_scale))[:, 0]
    return y.with_samples(y.samples + model.signal_scale * out)


def cloud_decode_bits(model: LstmModel, windows: np.ndarray, key: PnKey) -> np.ndarray:
    """Decode stacked windows (K, n * n_s) into hard bits (K, n_s), the sign of each span's mean bit output"""
    windows = np.asarray(windows, dtype=np.float64)
    n_s = _check_role(model, key, windows.shape[-1], DECODER_INPUTS, DECODER_OUTPUTS)
    out = lstm_forward_batch(model, network_inputs(windows, key, model.signal_scale))
    return hard_bits(out[:, :, 0].reshape(out.shape[0], n_s, key.n).mean(axis=2))


def cloud_decode(model: LstmModel, w: SignalFrame, key: PnKey) -> Tuple[BitStream, FeatureVector]:
    """Extracted bits and fingerprint features of one received window

    The features are those of the window with its key component removed from every span, which equal the
    features of the original carrier whatever bits were embedded.
    """
    bits = cloud_decode_bits(model, w.samples[None], key)
    return BitStream(bits=bits[0]), features(project_out_key(w, key))


def encoder_sample(
    y: SignalFrame, key: PnKey, calib: FeatureCalibration, params: WatermarkParams, scale: float
) -> TrainingSample:
    """Encoder training pair; the target is the oracle watermark term of the fingerprint+embed pipeline"""
    bits = fingerprint_bits(y, key, calib, params.n_s)
    w = embed(y, key, bits, params.beta)
    return TrainingSample(
        inputs=encoder_inputs(y.samples, key, bits.bits, scale),
        targets=((w.samples - y.samples) / scale)[:, None],
    )


def decoder_samples(
    y: SignalFrame, key: PnKey, calib: FeatureCalibration, params: WatermarkParams, scale: float
) -> Tuple[TrainingSample, TrainingSample]:
    """Decoder training pairs for one carrier window

    The window is watermarked once with its fingerprint bits and once with their complement, each step of a span
    trained towards the embedded bit. The complementary twin keeps the bit labels balanced so the readout bias has
    nothing to learn from an uneven fingerprint.
    """
    bits = fingerprint_bits(y, key, calib, params.n_s)
    pairs = []
    for s in (bits.bits, -bits.bits):
        w = embed(y, key, BitStream(bits=s), params.beta)
        pairs.append(
            TrainingSample(inputs=network_inputs(w.samples, key, scale), targets=np.repeat(s, key.n)[:, None])
        )
    return pairs[0], pairs[1]


def _gated_pair(model: LstmModel, chip: int, value: int, gain: float, gate: float) -> None:
    """Wire hidden units 0 and 1 so that ``h0 - h1`` follows ``chip * tanh(gain * value)``

    Unit 0 opens its input gate on chip +1, unit 1 on chip -1; both forget immediately and expose the cell.
    """
    if model.hidden_dim < 2:
        raise ShapeError("a gated unit pair needs at least two hidden units")
    for g in GATES:
        getattr(model, f"w_x{g}")[:2] = 0.0
        getattr(model, f"w_h{g}")[:2] = 0.0
        getattr(model, f"w_h{g}")[:, :2] = 0.0
    model.w_xi[0, chip] = gate
    model.w_xi[1, chip] = -gate
    model.w_xg[0, value] = gain
    model.w_xg[1, value] = gain
    model.b_i[:2] = 0.0
    model.b_g[:2] = 0.0
    model.b_f[:2] = -10.0
    model.b_o[:2] = 10.0
    model.w_hy[:, :2] = 0.0


def correlator_warm_start(
    model: LstmModel, beta_over_sigma: float, gain: float = 0.1, gate: float = 6.0, readout: bool = True
) -> None:
    """Seed the first two hidden units of a decoder with a key-gated correlator

    Unit 0 lets the input through when the chip is +1, unit 1 when it is -1, so the span mean of their difference
    is a (slightly compressed) matched-filter statistic. With ``readout`` the bit channel starts at the least-squares
    weights for a Gaussian carrier; without it the readout starts at zero and has to be learned.
    """
    _gated_pair(model, chip=1, value=0, gain=gain, gate=gate)
    model.w_hy[0, 2:] = 0.0
    model.b_y[0] = 0.0
    if not readout:
        return
    slope = 1.0 / (1.0 + math.exp(-gate)) - 1.0 / (1.0 + math.exp(gate))
    regression = beta_over_sigma / (1.0 + beta_over_sigma**2)
    model.w_hy[0, 0] = regression / (gain * slope)
    model.w_hy[0, 1] = -regression / (gain * slope)


def product_warm_start(
    model: LstmModel, beta_over_scale: float, gain: float = 2.0, gate: float = 6.0, readout: bool = True
) -> None:
    """Seed the first two hidden units of an encoder with a chip-times-bit product

    ``h0 - h1`` is proportional to ``chip * bit`` exactly, so a readout of ``+-beta / D`` on the pair reproduces
    the spread-spectrum watermark term. Without ``readout`` the projection starts at zero and has to be learned.
    """
    _gated_pair(model, chip=1, value=2, gain=gain, gate=gate)
    model.w_hy[:] = 0.0
    model.b_y[:] = 0.0
    if not readout:
        return
    o = 1.0 / (1.0 + math.exp(-10.0))
    cell = math.tanh(gain)
    d = o * (math.tanh(cell / (1.0 + math.exp(-gate))) - math.tanh(cell / (1.0 + math.exp(gate))))
    model.w_hy[0, 0] = beta_over_scale / d
    model.w_hy[0, 1] = -beta_over_scale / d


def new_encoder(
    params: WatermarkParams,
    scale: float,
    calib: FeatureCalibration,
    seed: int,
    hidden_dim: int = DEFAULT_HIDDEN,
    warm_start: bool = True,
    warm_readout: bool = True,
) -> LstmModel:
    model = init_model(
        ENCODER_INPUTS,
        hidden_dim,
        1,
        seed,
        role=LstmRole.ENCODER,
        signal_scale=scale,
        n=params.n,
        n_s=params.n_s,
        calibration=calib,
    )
    if warm_start:
        product_warm_start(model, params.beta / scale, readout=warm_readout)
    return model


def new_decoder(
    params: WatermarkParams,
    scale: float,
    seed: int,
    hidden_dim: int = DEFAULT_HIDDEN,
    warm_start: bool = True,
    warm_readout: bool = True,
) -> LstmModel:
    model = init_model(
        DECODER_INPUTS,
        hidden_dim,
        DECODER_OUTPUTS,
        seed,
        role=LstmRole.DECODER,
        signal_scale=scale,
        n=params.n,
        n_s=params.n_s,
    )
    if warm_start:
        correlator_warm_start(model, params.beta / scale, readout=warm_readout)
    return model


def decoded_bits_agreement(model: LstmModel, windows: np.ndarray, key: PnKey, expected: np.ndarray) -> float:
    """Fraction of decoded bits equal to ``expected`` (K, n_s)"""
    return float(np.mean(cloud_decode_bits(model, windows, key) == np.asarray(expected)))
