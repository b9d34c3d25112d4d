"""Framed spectral features: dB magnitude spectrograms and log-Mel energies.

Frames start at sample 0 with no centring or padding, so an ``N``-sample
signal yields ``1 + (N - W) // H`` frames for window ``W`` and hop ``H``.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import AudioBuffer
from .errors import InvalidParameter, ParseError, TooShort

SPEC_EPS = 1e-10
LOG_MEL_FLOOR = math.log(1e-10)
FEATURE_MAGIC = b"SNFM"
_HEADER = struct.Struct("<4sIId")


@dataclass(frozen=True)
class FrameSpec:
    window_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int | None = None

    def __post_init__(self):
        if self.window_ms <= 0 or self.hop_ms <= 0:
            raise InvalidParameter("window_ms and hop_ms must be positive")
        if self.hop_ms > self.window_ms:
            raise InvalidParameter(f"hop {self.hop_ms} ms exceeds window {self.window_ms} ms")
        if self.fft_size is not None and (self.fft_size < 1 or self.fft_size & (self.fft_size - 1)):
            raise InvalidParameter(f"fft_size must be a power of two, got {self.fft_size}")

    def window_length(self, rate: int) -> int:
        return int(round(self.window_ms * rate / 1000.0))

    def hop_length(self, rate: int) -> int:
        return max(1, int(round(self.hop_ms * rate / 1000.0)))

    def n_fft(self, rate: int) -> int:
        win = self.window_length(rate)
        if self.fft_size is None:
            return 1 << max(0, (win - 1).bit_length())
        if self.fft_size < win:
            raise InvalidParameter(f"fft_size {self.fft_size} is shorter than the {win}-sample window")
        return self.fft_size


@dataclass(frozen=True)
class MelSpec:
    n_mels: int = 80
    f_min: float = 0.0
    f_max: float | None = None
    floor: float = LOG_MEL_FLOOR

    def upper(self, rate: int) -> float:
        f_max = rate / 2.0 if self.f_max is None else float(self.f_max)
        if self.n_mels < 1:
            raise InvalidParameter("n_mels must be >= 1")
        if not 0.0 <= self.f_min < f_max <= rate / 2.0:
            raise InvalidParameter(f"need 0 <= f_min < f_max <= {rate / 2} Hz, got [{self.f_min}, {f_max}]")
        return f_max


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    frames: np.ndarray
    frame_rate: float
    kind: str

    @property
    def shape(self):
        return self.frames.shape


def frame_count(n_samples: int, window: int, hop: int) -> int:
    if n_samples < window:
        return 0
    return 1 + (n_samples - window) // hop


def hann(length: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)


def frames(samples: np.ndarray, window: int, hop: int) -> np.ndarray:
    """Return a (T, window) view of overlapping frames."""
    if samples.shape[0] < window:
        raise TooShort(f"{samples.shape[0]} samples is shorter than one {window}-sample frame")
    return sliding_window_view(samples, window)[::hop]


def _power_spectrum(audio: AudioBuffer, spec: FrameSpec):
    rate = audio.sample_rate
    win, hop, n_fft = spec.window_length(rate), spec.hop_length(rate), spec.n_fft(rate)
    framed = frames(audio.samples, win, hop) * hann(win)
    return np.fft.rfft(framed, n=n_fft, axis=1), rate / hop, n_fft


def stft_magnitude(audio: AudioBuffer, spec: FrameSpec = FrameSpec()) -> FeatureMatrix:
    """Magnitude spectrogram in dB, ``20 log10(|X| + 1e-10)``, shape ``(T, n_fft//2 + 1)``."""
    X, frame_rate, _ = _power_spectrum(audio, spec)
    return FeatureMatrix(20.0 * np.log10(np.abs(X) + SPEC_EPS), frame_rate, "spectrogram_db")


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_band_edges(rate: int, mel: MelSpec = MelSpec()) -> np.ndarray:
    """The ``n_mels + 2`` corner frequencies; band ``k`` peaks at ``edges[k + 1]``."""
    f_max = mel.upper(rate)
    points = np.linspace(hz_to_mel(mel.f_min), hz_to_mel(f_max), mel.n_mels + 2)
    return mel_to_hz(points)


def mel_filterbank(rate: int, n_fft: int, mel: MelSpec = MelSpec()) -> np.ndarray:
    """Triangular filters with unit peak, shape ``(n_mels, n_fft//2 + 1)``."""
    edges = mel_band_edges(rate, mel)
    freqs = np.fft.rfftfreq(n_fft, 1.0 / rate)
    lower, centre, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lower) / (centre - lower)
    falling = (upper - freqs) / (upper - centre)
    return np.maximum(0.0, np.minimum(rising, falling))


def log_mel(audio: AudioBuffer, frame: FrameSpec = FrameSpec(), mel: MelSpec = MelSpec()) -> FeatureMatrix:
    """Natural-log Mel filterbank energies clamped below at ``mel.floor``."""
    X, frame_rate, n_fft = _power_spectrum(audio, frame)
    power = X.real ** 2 + X.imag ** 2
    energies = power @ mel_filterbank(audio.sample_rate, n_fft, mel).T
    with np.errstate(divide="ignore"):
        logs = np.log(energies)
    return FeatureMatrix(np.maximum(logs, mel.floor), frame_rate, "log_mel")


def write_feature_csv(features: FeatureMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in features.frames:
            writer.writerow([repr(float(v)) for v in row])


def read_feature_csv(path, frame_rate: float, kind: str) -> FeatureMatrix:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    return FeatureMatrix(np.array(rows, dtype=np.float64), frame_rate, kind)


def write_feature_bin(features: FeatureMatrix, path) -> None:
    """Little-endian: magic, uint32 T, uint32 D, float64 frame rate, then row-major float32."""
    t, d = features.frames.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, t, d, float(features.frame_rate)))
        fh.write(np.ascontiguousarray(features.frames, dtype="<f4").tobytes())


def read_feature_bin(path, kind: str = "log_mel") -> FeatureMatrix:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ParseError("truncated feature header")
    magic, t, d, frame_rate = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise ParseError(f"bad magic {magic!r}")
    body = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    if body.size != t * d:
        raise ParseError(f"expected {t * d} values, found {body.size}")
    return FeatureMatrix(body.reshape(t, d).astype(np.float64), frame_rate, kind)
