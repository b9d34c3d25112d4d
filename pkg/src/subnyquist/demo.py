"""Deterministic synthetic mini-corpus for smoke tests and the CLI demo.

Ten short "utterances": voiced harmonic bursts separated by pauses, four
female-range and four male-range speakers plus two recordings with unknown
sex (standing in for multi-speaker or noise-only clips). Alongside the audio
it writes transcripts, simulated ASR hypotheses and VAD posteriors for a few
conditions, with error rates that grow as the rate drops and that are
higher for the female-range voices.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, write_wav
from .corpus import write_jsonl

RATE = 16000
DURATION_S = 1.5
VAD_FRAME_RATE = 100.0
VOCAB = ("the", "a", "house", "river", "green", "light", "walked", "slowly", "over", "bridge",
         "morning", "quiet", "stone", "window", "old", "garden", "letter", "it's", "never", "again")
SPEAKERS = (
    ("f1", "F", 210.0), ("f2", "F", 235.0), ("f3", "F", 190.0), ("f4", "F", 250.0),
    ("m1", "M", 105.0), ("m2", "M", 120.0), ("m3", "M", 95.0), ("m4", "M", 130.0),
    ("x1", "unknown", 160.0), ("x2", "unknown", 0.0),
)
# per-condition (word error probability for F, for M, VAD score noise)
CONDITIONS = {
    "16000_original": (0.02, 0.02, 0.15),
    "320_resampled": (0.6, 0.35, 0.35),
    "320_sub_upsampled": (0.4, 0.25, 0.28),
}


def _voiced_segments(rng):
    segments, t = [], 0.1
    while t < DURATION_S - 0.25:
        length = rng.uniform(0.2, 0.45)
        end = min(t + length, DURATION_S - 0.05)
        segments.append((round(t, 3), round(end, 3)))
        t = end + rng.uniform(0.08, 0.2)
    return segments


def _synth(rng, f0, segments):
    t = np.arange(int(RATE * DURATION_S)) / RATE
    signal = 0.003 * rng.standard_normal(t.size)
    if f0 <= 0:
        return signal + 0.05 * rng.standard_normal(t.size)
    phase = 2 * np.pi * np.cumsum(f0 * (1 + 0.03 * np.sin(2 * np.pi * 3 * t))) / RATE
    voice = sum(np.sin(k * phase) / k for k in range(1, 12))
    envelope = np.zeros_like(t)
    for start, end in segments:
        inside = (t >= start) & (t < end)
        envelope[inside] = np.hanning(inside.sum())
    return signal + 0.3 * envelope * voice


def _corrupt(words, p, rng):
    out = []
    for w in words:
        u = rng.random()
        if u < p / 3:
            continue
        if u < 2 * p / 3:
            out.append(VOCAB[rng.integers(len(VOCAB))])
        elif u < p:
            out.extend([w, VOCAB[rng.integers(len(VOCAB))]])
        else:
            out.append(w)
    return " ".join(out)


def make_mini_corpus(out_dir, seed: int = 0) -> Path:
    """Write the corpus under ``out_dir`` and return the manifest path."""
    out_dir = Path(out_dir)
    (out_dir / "audio").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    manifest, labels, transcripts = [], [], {}
    for index, (speaker, sex, f0) in enumerate(SPEAKERS):
        uid = f"utt{index:02d}"
        segments = _voiced_segments(rng) if f0 > 0 else []
        audio = AudioBuffer(_synth(rng, f0, segments), RATE)
        write_wav(audio, out_dir / "audio" / f"{uid}.wav", "pcm16")
        words = [VOCAB[i] for i in rng.integers(len(VOCAB), size=rng.integers(6, 12))]
        transcripts[uid] = words
        manifest.append({"id": uid, "audio_path": f"audio/{uid}.wav", "transcript": " ".join(words),
                         "speaker_id": speaker, "sex": sex, "duration_s": DURATION_S})
        labels.append({"id": uid, "segments": [list(s) for s in segments], "duration_s": DURATION_S})
    write_jsonl(manifest, out_dir / "manifest.jsonl")
    write_jsonl(labels, out_dir / "vad_labels.jsonl")

    n_frames = int(DURATION_S * VAD_FRAME_RATE)
    centres = (np.arange(n_frames) + 0.5) / VAD_FRAME_RATE
    (out_dir / "hyps").mkdir(exist_ok=True)
    (out_dir / "vad_scores").mkdir(exist_ok=True)
    for name, (p_f, p_m, noise) in CONDITIONS.items():
        hyps, scores = [], []
        for entry, label in zip(manifest, labels):
            p = p_f if entry["sex"] == "F" else p_m
            hyps.append({"id": entry["id"], "text": _corrupt(transcripts[entry["id"]], p, rng)})
            truth = np.zeros(n_frames)
            for start, end in label["segments"]:
                truth[(centres >= start) & (centres < end)] = 1.0
            raw = 0.2 + 0.6 * truth + noise * rng.standard_normal(n_frames)
            scores.append({"id": entry["id"], "frame_rate_hz": VAD_FRAME_RATE,
                           "scores": [round(float(v), 4) for v in np.clip(raw, 0.0, 1.0)]})
        write_jsonl(hyps, out_dir / "hyps" / f"{name}.jsonl")
        write_jsonl(scores, out_dir / "vad_scores" / f"{name}.jsonl")
    return out_dir / "manifest.jsonl"
