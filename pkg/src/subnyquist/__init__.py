"""Sub-Nyquist audio degradation for speech privacy, and the tools to evaluate it."""

from .audio_io import AudioBuffer, downmix, read_wav, write_wav
from .resampler import DegradeSpec, FirKernel, degrade, design_kernel, resample_aa, subsample, upsample

__all__ = [
    "AudioBuffer",
    "DegradeSpec",
    "FirKernel",
    "degrade",
    "design_kernel",
    "downmix",
    "read_wav",
    "resample_aa",
    "subsample",
    "upsample",
    "write_wav",
]
