"""Device-to-cloud wire frame.

Little-endian layout, 25 header bytes followed by the window samples::

    magic        4s   b"AQWM"
    version      B    1
    device_id    I
    window_index Q
    n            H
    n_s          H
    f_s_millihz  I
    payload      n * n_s float64
"""

import struct

import numpy as np
from aqwm.dto import SignalFrame, WatermarkParams, WireFrame

from ..exc import CodecError, ShapeError

MAGIC = b"AQWM"
VERSION = 1

_HEADER_STRUCT = struct.Struct("<4sBIQHHI")
HEADER_LEN = _HEADER_STRUCT.size
_PAYLOAD_DTYPE = np.dtype("<f8")

_MAX_U16 = 0xFFFF
_MAX_U32 = 0xFFFFFFFF
_MAX_U64 = 0xFFFFFFFFFFFFFFFF


def to_millihz(sample_rate_hz: float) -> int:
    return int(round(sample_rate_hz * 1000.0))


def frame_length(n: int, n_s: int) -> int:
    """Total byte length of a frame carrying one n * n_s window"""
    return HEADER_LEN + _PAYLOAD_DTYPE.itemsize * n * n_s


def encode_frame(frame: SignalFrame, device_id: int, window_index: int, params: WatermarkParams) -> bytes:
    if len(frame) != params.window_len:
        raise ShapeError(f"frame has {len(frame)} samples, expected n * n_s = {params.window_len}")
    if not 0 <= device_id <= _MAX_U32:
        raise CodecError(f"device id {device_id} does not fit in 32 bits", field="device_id")
    if not 0 <= window_index <= _MAX_U64:
        raise CodecError(f"window index {window_index} does not fit in 64 bits", field="window_index")
    if params.n > _MAX_U16 or params.n_s > _MAX_U16:
        raise CodecError(f"n = {params.n}, n_s = {params.n_s} do not fit in 16 bits", field="n")
    millihz = to_millihz(params.sample_rate_hz)
    if not 0 < millihz <= _MAX_U32:
        raise CodecError(f"sample rate {params.sample_rate_hz} Hz does not fit in 32-bit millihertz", field="f_s")

    header = _HEADER_STRUCT.pack(MAGIC, VERSION, device_id, window_index, params.n, params.n_s, millihz)
    return header + frame.samples.astype(_PAYLOAD_DTYPE).tobytes()


def decode_frame(data: bytes) -> WireFrame:
    """Exact inverse of :func:`encode_frame`

    Raises:
        CodecError: short header, bad magic, unsupported version or a payload that does not match the header
    """
    data = bytes(data)
    if len(data) < HEADER_LEN:
        raise CodecError(f"short header: {len(data)} of {HEADER_LEN} bytes", field="header")
    magic, version, device_id, window_index, n, n_s, millihz = _HEADER_STRUCT.unpack_from(data, 0)
    if magic != MAGIC:
        raise CodecError(f"bad magic {magic!r}", field="magic")
    if version != VERSION:
        raise CodecError(f"unsupported version {version}", field="version")
    if n == 0 or n_s == 0:
        raise CodecError("n and n_s must be positive", field="n" if n == 0 else "n_s")
    if millihz == 0:
        raise CodecError("sample rate must be positive", field="f_s")
    expected = frame_length(n, n_s)
    if len(data) != expected:
        raise CodecError(f"payload length: frame has {len(data)} bytes, header announces {expected}", field="payload")

    samples = np.frombuffer(data, dtype=_PAYLOAD_DTYPE, offset=HEADER_LEN).astype(np.float64)
    if not np.all(np.isfinite(samples)):
        raise CodecError("payload holds non-finite samples", field="payload")
    sample_rate_hz = millihz / 1000.0
    return WireFrame(
        device_id=device_id,
        window_index=window_index,
        n=n,
        n_s=n_s,
        sample_rate_hz=sample_rate_hz,
        frame=SignalFrame(samples=samples, sample_rate_hz=sample_rate_hz),
    )


def transport(frame: SignalFrame, device_id: int, window_index: int, params: WatermarkParams) -> SignalFrame:
    """Send one window through the codec and hand back what the cloud decodes"""
    return decode_frame(encode_frame(frame, device_id, window_index, params)).frame

