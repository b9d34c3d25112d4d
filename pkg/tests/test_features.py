import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subnyquist.audio_io import AudioBuffer
from subnyquist.errors import InvalidParameter, ParseError, TooShort
from subnyquist.features import (
    LOG_MEL_FLOOR,
    SPEC_EPS,
    FrameSpec,
    MelSpec,
    frame_count,
    log_mel,
    mel_band_edges,
    mel_filterbank,
    read_feature_bin,
    read_feature_csv,
    stft_magnitude,
    write_feature_bin,
    write_feature_csv,
)
from subnyquist.resampler import DegradeSpec, degrade

FS = 16000


def tone(freq, seconds=1.0, amp=1.0):
    t = np.arange(int(FS * seconds)) / FS
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), FS)


class TestFrameSpec:
    def test_defaults_at_16k(self):
        spec = FrameSpec()
        assert (spec.window_length(FS), spec.hop_length(FS), spec.n_fft(FS)) == (400, 160, 512)

    def test_hop_longer_than_window(self):
        with pytest.raises(InvalidParameter):
            FrameSpec(window_ms=10, hop_ms=25)

    def test_fft_must_cover_window(self):
        with pytest.raises(InvalidParameter):
            FrameSpec(fft_size=256).n_fft(FS)

    def test_fft_power_of_two(self):
        with pytest.raises(InvalidParameter):
            FrameSpec(fft_size=500)


class TestSpectrogram:
    def test_frame_count_one_second(self):
        assert stft_magnitude(AudioBuffer(np.zeros(FS), FS)).shape == (98, 257)

    def test_tone_bin(self):
        frames = stft_magnitude(tone(1000)).frames
        assert np.all(np.argmax(frames, axis=1) == round(1000 * 512 / FS))

    def test_silence_is_epsilon(self):
        frames = stft_magnitude(AudioBuffer(np.zeros(800), FS)).frames
        assert np.all(frames == 20 * math.log10(SPEC_EPS))

    def test_too_short(self):
        with pytest.raises(TooShort):
            stft_magnitude(AudioBuffer(np.zeros(399), FS))

    def test_frame_rate(self):
        assert stft_magnitude(tone(100)).frame_rate == pytest.approx(100.0)

    def test_anti_aliased_spectrogram_shadow(self):
        noise = AudioBuffer(np.random.default_rng(0).standard_normal(2 * FS), FS)
        spec = stft_magnitude(degrade(noise, DegradeSpec(320, True)))
        power = 10 ** (spec.frames / 10)
        freqs = np.fft.rfftfreq(512, 1 / FS)
        ratio = power[:, freqs > 200].mean() / power[:, freqs < 160].mean()
        assert 10 * math.log10(ratio) <= -30


class TestMel:
    def test_shape(self):
        assert log_mel(tone(440)).shape == (98, 80)

    def test_silence_hits_floor(self):
        assert np.all(log_mel(AudioBuffer(np.zeros(FS), FS)).frames == LOG_MEL_FLOOR)

    def test_doubling_amplitude(self):
        x = AudioBuffer(np.random.default_rng(1).standard_normal(FS) * 0.1, FS)
        a = log_mel(x).frames
        b = log_mel(AudioBuffer(2 * x.samples, FS)).frames
        above = a > LOG_MEL_FLOOR + 1
        np.testing.assert_allclose((b - a)[above], 2 * math.log(2), atol=1e-9)

    def test_filters_non_negative_and_cover_interior(self):
        fb = mel_filterbank(FS, 512)
        freqs = np.fft.rfftfreq(512, 1 / FS)
        interior = (freqs > 0) & (freqs < FS / 2)
        assert np.all(fb >= 0)
        assert np.all(fb[:, interior].sum(axis=0) > 0)

    def test_peak_weights_at_centres(self):
        edges = mel_band_edges(FS)
        mels = 2595 * np.log10(1 + edges / 700)
        np.testing.assert_allclose(np.diff(mels), np.diff(mels)[0])

    def test_tone_at_band_centre(self):
        # oracle: a triangular filter evaluated at its own centre has weight 1,
        # every other filter weight 0 there; checked on bands wide enough to
        # resolve with a 25 ms window (at least two FFT bins from edge to edge)
        edges = mel_band_edges(FS)
        bin_hz = FS / 512
        checked = 0
        for k in range(1, 79):
            if edges[k + 2] - edges[k] < 2 * bin_hz:
                continue
            frames = log_mel(tone(edges[k + 1], seconds=0.2)).frames
            assert np.all(np.argmax(frames, axis=1) == k), k
            checked += 1
        assert checked >= 60

    def test_invalid_range(self):
        with pytest.raises(InvalidParameter):
            log_mel(tone(100), mel=MelSpec(f_min=5000, f_max=4000))
        with pytest.raises(InvalidParameter):
            log_mel(tone(100), mel=MelSpec(f_max=9000))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 600), st.integers(1, 600))
def test_frame_count_formula(n, w, h):
    from subnyquist.features import frames

    if n < w:
        with pytest.raises(TooShort):
            frames(np.zeros(n), w, h)
        assert frame_count(n, w, h) == 0
    else:
        assert frames(np.zeros(n), w, h).shape[0] == 1 + (n - w) // h == frame_count(n, w, h)


class TestSerialisation:
    def test_binary_round_trip(self, tmp_path):
        feats = log_mel(tone(300))
        write_feature_bin(feats, tmp_path / "f.feat")
        raw = (tmp_path / "f.feat").read_bytes()
        assert raw[:4] == b"SNFM"
        back = read_feature_bin(tmp_path / "f.feat")
        assert back.shape == feats.shape and back.frame_rate == feats.frame_rate
        np.testing.assert_array_equal(back.frames, feats.frames.astype(np.float32))

    def test_binary_bad_magic(self, tmp_path):
        (tmp_path / "x.feat").write_bytes(b"XXXX" + b"\x00" * 16)
        with pytest.raises(ParseError):
            read_feature_bin(tmp_path / "x.feat")

    def test_csv_round_trip(self, tmp_path):
        feats = stft_magnitude(tone(300, seconds=0.1))
        write_feature_csv(feats, tmp_path / "f.csv")
        back = read_feature_csv(tmp_path / "f.csv", feats.frame_rate, feats.kind)
        np.testing.assert_array_equal(back.frames, feats.frames)
