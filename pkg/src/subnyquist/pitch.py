"""YIN fundamental-frequency tracking and per-utterance mean pitch."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import InvalidRange, TooShort
from .features import FrameSpec, frames

DEFAULT_F_MIN = 80.0
DEFAULT_F_MAX = 400.0
DEFAULT_THRESHOLD = 0.15


@dataclass(frozen=True, eq=False)
class PitchTrack:
    """Per-frame f0 in Hz, NaN where the frame is unvoiced."""

    f0: np.ndarray
    hop_s: float
    threshold: float
    f_min: float
    f_max: float

    @property
    def voiced(self) -> np.ndarray:
        return ~np.isnan(self.f0)

    @property
    def mean_f0(self) -> float | None:
        return mean_pitch(self)

    def rows(self):
        """``(frame_index, time_s, f0_hz or None)`` per frame."""
        for i, f in enumerate(self.f0):
            yield i, i * self.hop_s, None if math.isnan(f) else float(f)


def difference_function(frame: np.ndarray, max_lag: int) -> np.ndarray:
    """Squared difference ``d(tau)`` for ``tau = 0 .. max_lag`` over a window of
    ``len(frame) - max_lag`` samples."""
    w = frame.shape[0] - max_lag
    head = frame[:w]
    # sum (x_j - x_{j+tau})^2 = sum x_j^2 + sum x_{j+tau}^2 - 2 sum x_j x_{j+tau}
    energy = np.concatenate([[0.0], np.cumsum(frame ** 2)])
    shifted_energy = energy[w:w + max_lag + 1] - energy[:max_lag + 1]
    n = 1 << (frame.shape[0] + w).bit_length()
    corr = np.fft.irfft(np.fft.rfft(frame, n) * np.conj(np.fft.rfft(head, n)), n)[:max_lag + 1]
    d = energy[w] + shifted_energy - 2.0 * corr
    return np.maximum(d, 0.0)


def cmndf(d: np.ndarray) -> np.ndarray:
    """Cumulative-mean-normalised difference: 1 at lag 0, ``d(tau) * tau / sum d(1..tau)`` after."""
    out = np.ones_like(d)
    running = np.cumsum(d[1:])
    lags = np.arange(1, d.shape[0])
    with np.errstate(invalid="ignore", divide="ignore"):
        out[1:] = np.where(running > 0, d[1:] * lags / running, 1.0)
    return out


def _parabolic(y: np.ndarray, i: int) -> float:
    a, b, c = y[i - 1], y[i], y[i + 1]
    denom = a - 2.0 * b + c
    if denom <= 0:
        return float(i)
    return i + 0.5 * (a - c) / denom


def _frame_f0(frame, rate, lag_lo, lag_hi, min_lag, max_lag, threshold):
    d = cmndf(difference_function(frame, lag_hi + 1))
    below = np.nonzero(d[lag_lo:lag_hi + 1] < threshold)[0]
    if below.size == 0:
        return math.nan
    tau = lag_lo + int(below[0])
    while tau + 1 <= lag_hi and d[tau + 1] < d[tau]:
        tau += 1
    refined = min(max(_parabolic(d, tau), min_lag), max_lag)
    return rate / refined


def yin_track(audio: AudioBuffer, f_min: float = DEFAULT_F_MIN, f_max: float = DEFAULT_F_MAX,
              frame: FrameSpec = FrameSpec(), threshold: float = DEFAULT_THRESHOLD) -> PitchTrack:
    """Track f0 with YIN over lags ``rate/f_max .. rate/f_min``.

    Analysis frames are ``2 * rate / f_min`` samples long and advance by the
    hop of ``frame``. A frame is voiced when the normalised difference dips
    below ``threshold``; the first such dip is followed down to its local
    minimum and refined by parabolic interpolation.
    """
    if f_min <= 0 or f_min >= f_max:
        raise InvalidRange(f"need 0 < f_min < f_max, got [{f_min}, {f_max}]")
    rate = audio.sample_rate
    if rate < 4 * f_max:
        raise InvalidRange(f"rate {rate} Hz is below 4 * f_max = {4 * f_max} Hz")
    min_lag, max_lag = rate / f_max, rate / f_min
    lag_lo, lag_hi = math.ceil(min_lag), math.floor(max_lag)
    frame_len = int(math.ceil(2 * max_lag))
    # the window must stay positive after reserving lag_hi + 1 for the neighbour
    frame_len = max(frame_len, lag_hi + 3)
    if len(audio) < frame_len:
        raise TooShort(f"{len(audio)} samples; YIN needs at least {frame_len}")

    hop = frame.hop_length(rate)
    f0 = np.array([_frame_f0(fr, rate, lag_lo, lag_hi, min_lag, max_lag, threshold)
                   for fr in frames(audio.samples, frame_len, hop)])
    return PitchTrack(f0, hop / rate, threshold, float(f_min), float(f_max))


def mean_pitch(track: PitchTrack) -> float | None:
    """Mean f0 over voiced frames, or None if nothing is voiced."""
    voiced = track.f0[~np.isnan(track.f0)]
    if voiced.size == 0:
        return None
    return float(voiced.mean())


def write_track_csv(track: PitchTrack, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "time_s", "f0_hz"])
        for i, time_s, f in track.rows():
            writer.writerow([i, f"{time_s:.6f}", "" if f is None else f"{f:.6f}"])


def read_track_csv(path, threshold=DEFAULT_THRESHOLD, f_min=DEFAULT_F_MIN, f_max=DEFAULT_F_MAX) -> PitchTrack:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    f0 = np.array([float(r["f0_hz"]) if r["f0_hz"] else math.nan for r in rows])
    hop_s = float(rows[1]["time_s"]) - float(rows[0]["time_s"]) if len(rows) > 1 else 0.0
    return PitchTrack(f0, hop_s, threshold, f_min, f_max)
