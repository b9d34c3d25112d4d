"""Anti-aliased and naive (aliasing) rate conversion.

Rate conversion uses a bank of Hann-windowed sinc interpolation kernels,
one per output phase, in the style of polyphase resamplers: the ratio
``src/dst`` is reduced by its gcd to ``orig:new``, the input is cut into
blocks of ``orig`` samples and each block yields ``new`` output samples.

Naive subsampling keeps every ``factor``-th sample and does no filtering,
so everything above the new Nyquist frequency folds back into the band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import AudioBuffer
from .errors import InvalidParameter, NonIntegerFactor

DEFAULT_ZERO_CROSSINGS = 6
DEFAULT_ROLLOFF = 0.99
LOW_RATES = (1600, 800, 500, 320)


@dataclass(frozen=True, eq=False)
class FirKernel:
    """Polyphase low-pass kernel bank.

    ``coefficients[j]`` produces output phase ``j`` of every block. Tap ``k``
    of a row sits ``(k - width) / orig`` blocks away from the block start, so
    row 0 is centred on tap ``width``.
    """

    coefficients: np.ndarray
    cutoff_hz: float
    src_rate: int
    dst_rate: int
    zero_crossings: int
    rolloff: float
    orig: int
    new: int
    width: int

    @property
    def n_phases(self) -> int:
        return self.new

    @property
    def n_taps(self) -> int:
        return self.coefficients.shape[1]

    def dc_gain(self) -> np.ndarray:
        return self.coefficients.sum(axis=1)


def _check_rates(src_rate, dst_rate):
    for name, value in (("src_rate", src_rate), ("dst_rate", dst_rate)):
        if int(value) != value or value <= 0:
            raise InvalidParameter(f"{name} must be a positive integer, got {value!r}")


def design_kernel(src_rate: int, dst_rate: int, zero_crossings: int = DEFAULT_ZERO_CROSSINGS,
                  rolloff: float = DEFAULT_ROLLOFF) -> FirKernel:
    """Design the Hann-windowed sinc kernel bank for ``src_rate -> dst_rate``.

    The cutoff is ``rolloff * min(src_rate, dst_rate) / 2``. When the rates
    are equal there is nothing to protect against, so the cutoff is placed
    at Nyquist and the kernel degenerates to the identity.
    """
    _check_rates(src_rate, dst_rate)
    if int(zero_crossings) != zero_crossings or zero_crossings < 1:
        raise InvalidParameter(f"zero_crossings must be an integer >= 1, got {zero_crossings!r}")
    if not 0.0 < rolloff <= 1.0:
        raise InvalidParameter(f"rolloff must lie in (0, 1], got {rolloff!r}")
    src_rate, dst_rate, zero_crossings = int(src_rate), int(dst_rate), int(zero_crossings)

    g = math.gcd(src_rate, dst_rate)
    orig, new = src_rate // g, dst_rate // g
    effective_rolloff = 1.0 if orig == new else rolloff
    # cutoff in cycles per block of orig input samples, doubled
    base = min(orig, new) * effective_rolloff
    width = math.ceil(zero_crossings * orig / base)

    offsets = np.arange(-width, width + orig, dtype=np.float64) / orig
    phases = np.arange(new, dtype=np.float64)[:, None] / new
    t = (offsets[None, :] - phases) * base
    window = np.where(np.abs(t) < zero_crossings, np.cos(t * np.pi / (2 * zero_crossings)) ** 2, 0.0)
    taps = np.sinc(t) * window
    taps /= taps.sum(axis=1, keepdims=True)
    taps.flags.writeable = False

    return FirKernel(
        coefficients=taps,
        cutoff_hz=effective_rolloff * min(src_rate, dst_rate) / 2.0,
        src_rate=src_rate,
        dst_rate=dst_rate,
        zero_crossings=zero_crossings,
        rolloff=float(rolloff),
        orig=orig,
        new=new,
        width=width,
    )


def apply_kernel(samples: np.ndarray, kernel: FirKernel) -> np.ndarray:
    """Run ``samples`` through ``kernel``; output length is ``ceil(n * new / orig)``.

    The signal is treated as zero outside its support.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = x.shape[0]
    orig, new, width = kernel.orig, kernel.new, kernel.width
    target = -(-n * new // orig)
    if target == 0:
        return np.zeros(0)
    n_blocks = -(-target // new)
    n_taps = kernel.n_taps
    padded_len = (n_blocks - 1) * orig + n_taps
    padded = np.zeros(padded_len)
    stop = min(n, padded_len - width)
    padded[width:width + stop] = x[:stop]

    blocks = sliding_window_view(padded, n_taps)[::orig][:n_blocks]
    out = blocks @ kernel.coefficients.T
    return out.reshape(-1)[:target]


def resample_aa(audio: AudioBuffer, dst_rate: int, zero_crossings: int = DEFAULT_ZERO_CROSSINGS,
                rolloff: float = DEFAULT_ROLLOFF) -> AudioBuffer:
    """Band-limited rate conversion to ``dst_rate`` (any rational ratio)."""
    kernel = design_kernel(audio.sample_rate, dst_rate, zero_crossings, rolloff)
    if kernel.orig == kernel.new:
        return AudioBuffer(audio.samples, dst_rate)
    return AudioBuffer(apply_kernel(audio.samples, kernel), dst_rate)


def subsample(audio: AudioBuffer, factor: int) -> AudioBuffer:
    """Keep every ``factor``-th sample. No filtering, so aliases are kept."""
    if int(factor) != factor or factor < 1:
        raise InvalidParameter(f"factor must be an integer >= 1, got {factor!r}")
    factor = int(factor)
    if audio.sample_rate % factor:
        raise NonIntegerFactor(f"rate {audio.sample_rate} Hz is not divisible by {factor}")
    return AudioBuffer(audio.samples[::factor], audio.sample_rate // factor)


def upsample(audio: AudioBuffer, dst_rate: int, zero_crossings: int = DEFAULT_ZERO_CROSSINGS,
             rolloff: float = DEFAULT_ROLLOFF) -> AudioBuffer:
    """Interpolate up to ``dst_rate``, low-passing at ``rolloff * rate / 2``.

    Whatever the low-rate signal contains, aliases included, is kept; the
    images above its Nyquist frequency are removed.
    """
    if dst_rate < audio.sample_rate:
        raise InvalidParameter(f"upsample target {dst_rate} Hz is below source rate {audio.sample_rate} Hz")
    return resample_aa(audio, dst_rate, zero_crossings, rolloff)


@dataclass(frozen=True)
class DegradeSpec:
    """Privacy degradation setting: target low rate and whether to filter first."""

    low_rate: int
    anti_alias: bool = True
    zero_crossings: int = DEFAULT_ZERO_CROSSINGS
    rolloff: float = DEFAULT_ROLLOFF

    def __post_init__(self):
        if int(self.low_rate) != self.low_rate or self.low_rate <= 0:
            raise InvalidParameter(f"low_rate must be a positive integer, got {self.low_rate!r}")
        if int(self.zero_crossings) != self.zero_crossings or self.zero_crossings < 1:
            raise InvalidParameter(f"zero_crossings must be an integer >= 1, got {self.zero_crossings!r}")
        if not 0.0 < self.rolloff <= 1.0:
            raise InvalidParameter(f"rolloff must lie in (0, 1], got {self.rolloff!r}")

    def factor(self, source_rate: int) -> int:
        """Integer stride for the naive path; raises if ``low_rate`` does not divide ``source_rate``."""
        if source_rate % self.low_rate:
            raise NonIntegerFactor(f"{self.low_rate} Hz does not divide {source_rate} Hz")
        return source_rate // self.low_rate


def _fit_length(samples: np.ndarray, n: int) -> np.ndarray:
    if samples.shape[0] >= n:
        return samples[:n]
    return np.concatenate([samples, np.zeros(n - samples.shape[0])])


def degrade(audio: AudioBuffer, spec: DegradeSpec) -> AudioBuffer:
    """Reduce ``audio`` to ``spec.low_rate`` and bring it back to its own rate.

    With ``anti_alias`` the downward step is band-limited; without it the
    signal is subsampled by an integer stride and aliases survive. The
    output always has the same rate and length as the input.
    """
    rate = audio.sample_rate
    if spec.low_rate > rate:
        raise InvalidParameter(f"low_rate {spec.low_rate} Hz exceeds source rate {rate} Hz")
    if spec.anti_alias:
        low = resample_aa(audio, spec.low_rate, spec.zero_crossings, spec.rolloff)
    else:
        low = subsample(audio, spec.factor(rate))
    back = upsample(low, rate, spec.zero_crossings, spec.rolloff)
    return AudioBuffer(_fit_length(back.samples, len(audio)), rate)
