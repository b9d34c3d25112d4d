"""Mono RIFF/WAVE reading and writing.

Only two encodings are handled: 16-bit integer PCM and 32-bit IEEE float,
both little-endian. Samples are always returned as float64 in [-1, 1].
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, IoFailure, MalformedHeader, MultiChannel, UnsupportedEncoding

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

PCM16_SCALE = 32768.0
PCM16_MAX = 1.0 - 2.0 ** -15


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """A mono signal and its sampling rate in Hz.

    ``samples`` is stored as a read-only float64 array so buffers can be
    shared between workers without copying.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidParameter(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        if not np.all(np.isfinite(samples)):
            raise InvalidParameter("samples contain NaN or Inf")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def __eq__(self, other):
        if not isinstance(other, AudioBuffer):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(self.samples, other.samples)

    def __repr__(self):
        return f"AudioBuffer(n={len(self)}, sample_rate={self.sample_rate})"


def downmix(channels: np.ndarray, sample_rate: int) -> AudioBuffer:
    """Average a (frames, channels) array into a mono buffer."""
    channels = np.asarray(channels, dtype=np.float64)
    if channels.ndim == 1:
        return AudioBuffer(channels, sample_rate)
    return AudioBuffer(channels.mean(axis=1), sample_rate)


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        yield chunk_id, body
        pos += 8 + size + (size & 1)  # chunks are word aligned


def _parse(data: bytes):
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeader("not a RIFF/WAVE file")
    fmt = None
    payload = None
    for chunk_id, body in _iter_chunks(data):
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            payload = body
    if fmt is None or len(fmt) < 16:
        raise MalformedHeader("missing or truncated fmt chunk")
    if payload is None:
        raise MalformedHeader("missing data chunk")

    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise MalformedHeader("truncated WAVE_FORMAT_EXTENSIBLE fmt chunk")
        # first two bytes of the subformat GUID carry the plain format tag
        (tag,) = struct.unpack_from("<H", fmt, 24)
    return tag, channels, rate, block_align, bits, payload


def read_wav(path) -> AudioBuffer:
    """Read a mono PCM16 or float32 WAV file.

    PCM16 values are divided by 32768, so -32768 maps to exactly -1.0.
    Multichannel files raise :class:`MultiChannel`; use :func:`read_wav_channels`
    and :func:`downmix` when downmixing is really wanted.
    """
    data, rate, channels = _decode(path)
    if channels != 1:
        raise MultiChannel(f"{os.fspath(path)}: {channels} channels (expected mono)")
    return AudioBuffer(data, rate)


def read_wav_channels(path):
    """Return ``(frames x channels array, sample_rate)`` without the mono check."""
    data, rate, channels = _decode(path)
    return data.reshape(-1, channels), rate


def _decode(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

    tag, channels, rate, block_align, bits, payload = _parse(raw)
    if channels < 1 or rate < 1:
        raise MalformedHeader(f"invalid channel count {channels} or rate {rate}")
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), PCM16_SCALE
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedEncoding(f"format tag {tag:#06x} with {bits} bits per sample")

    n_frames = len(payload) // (dtype.itemsize * channels)
    data = np.frombuffer(payload, dtype=dtype, count=n_frames * channels)
    data = data.astype(np.float64) / scale
    return data, rate, channels


def write_wav(buffer: AudioBuffer, path, encoding: str = "float32") -> None:
    """Write ``buffer`` as a mono WAV file.

    ``encoding`` is ``"pcm16"`` or ``"float32"``. For PCM16 the signal is
    clamped to [-1, 1 - 2**-15] and rounded to the nearest step.
    """
    samples = buffer.samples
    if encoding == "pcm16":
        clipped = np.clip(samples, -1.0, PCM16_MAX)
        body = np.round(clipped * PCM16_SCALE).astype("<i2").tobytes()
        tag, bits = WAVE_FORMAT_PCM, 16
    elif encoding == "float32":
        body = samples.astype("<f4").tobytes()
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        raise InvalidParameter(f"unknown encoding {encoding!r}")

    block_align = bits // 8
    fmt = struct.pack("<HHIIHH", tag, 1, buffer.sample_rate, buffer.sample_rate * block_align, block_align, bits)
    chunks = [b"fmt ", struct.pack("<I", len(fmt)), fmt]
    if tag == WAVE_FORMAT_IEEE_FLOAT:
        # non-PCM formats carry a fact chunk with the frame count
        chunks += [b"fact", struct.pack("<II", 4, len(samples))]
    chunks += [b"data", struct.pack("<I", len(body)), body]
    if len(body) & 1:
        chunks.append(b"\x00")
    riff_body = b"WAVE" + b"".join(chunks)
    try:
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", len(riff_body)) + riff_body)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
