"""Manifest-driven batch runs and grouped reports.

Manifests and model outputs are JSON-lines files. Every batch stage maps a
per-file function over the entries with a thread pool, then reduces the
results in id order so reports do not depend on scheduling.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import asr_metrics, stats, vad_metrics
from .audio_io import AudioBuffer, read_wav, write_wav
from .errors import (
    DuplicateId,
    InvalidParameter,
    LengthMismatch,
    MissingHypotheses,
    ParseError,
    SubnyquistError,
    UnknownIds,
)
from .features import FrameSpec, MelSpec, log_mel, stft_magnitude, write_feature_bin, write_feature_csv
from .pitch import mean_pitch, write_track_csv, yin_track
from .resampler import DEFAULT_ROLLOFF, DEFAULT_ZERO_CROSSINGS, DegradeSpec, degrade

log = logging.getLogger(__name__)

REFERENCE_RATE = 16000
DEFAULT_RATES = (16000, 1600, 800, 500, 320)
SEXES = ("F", "M", "unknown")
# the 320 Hz condition's Nyquist frequency splits low from high voices
PITCH_BINS = ((80.0, 160.0), (160.0, 400.0))
VAD_THRESHOLD = 0.5
STOPBAND_MARGIN = 1.25

ORIGINAL = "original"
RESAMPLED = "resampled"
SUB_UPSAMPLED = "sub_upsampled"
VARIANT_ALIASES = {
    "aa": RESAMPLED,
    RESAMPLED: RESAMPLED,
    "alias": SUB_UPSAMPLED,
    "su": SUB_UPSAMPLED,
    SUB_UPSAMPLED: SUB_UPSAMPLED,
}


# ---------------------------------------------------------------- manifests


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: str
    transcript: str | None = None
    speaker_id: str = ""
    sex: str = "unknown"
    duration_s: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        record = {k: v for k, v in asdict(self).items() if k != "extra" and v is not None}
        record.update(self.extra)
        return record


_KNOWN_FIELDS = {"id", "audio_path", "transcript", "speaker_id", "sex", "duration_s"}


def _entry_from_record(record, line, base_dir):
    if not isinstance(record, dict):
        raise ParseError("expected a JSON object", line)
    for key in ("id", "audio_path"):
        if key not in record:
            raise ParseError(f"missing field {key!r}", line)
    sex = record.get("sex") or "unknown"
    if sex not in SEXES:
        raise ParseError(f"sex must be one of {SEXES}, got {sex!r}", line)
    audio_path = str(record["audio_path"])
    if base_dir is not None and not os.path.isabs(audio_path):
        audio_path = os.path.join(base_dir, audio_path)
    duration = record.get("duration_s")
    return ManifestEntry(
        id=str(record["id"]),
        audio_path=audio_path,
        transcript=record.get("transcript"),
        speaker_id=str(record.get("speaker_id", "")),
        sex=sex,
        duration_s=None if duration is None else float(duration),
        extra={k: v for k, v in record.items() if k not in _KNOWN_FIELDS},
    )


def read_jsonl(path) -> list[tuple[int, dict]]:
    """``(line_number, record)`` for every non-blank line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append((number, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", number) from exc
    return records


def write_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def load_manifest(path, resolve_paths: bool = True) -> list[ManifestEntry]:
    """Parse a JSON-lines manifest. Relative audio paths resolve against its directory."""
    base_dir = os.path.dirname(os.path.abspath(path)) if resolve_paths else None
    entries, seen = [], set()
    for line, record in read_jsonl(path):
        entry = _entry_from_record(record, line, base_dir)
        if entry.id in seen:
            raise DuplicateId(line, entry.id)
        seen.add(entry.id)
        entries.append(entry)
    return entries


# --------------------------------------------------------------- conditions


@dataclass(frozen=True, order=True)
class Condition:
    rate: int
    variant: str

    @property
    def name(self) -> str:
        return f"{self.rate}_{self.variant}"

    def degrade_spec(self, zero_crossings=DEFAULT_ZERO_CROSSINGS, rolloff=DEFAULT_ROLLOFF) -> DegradeSpec:
        return DegradeSpec(self.rate, self.variant != SUB_UPSAMPLED, zero_crossings, rolloff)


@dataclass(frozen=True)
class ConditionGrid:
    rates: tuple = DEFAULT_RATES
    variants: tuple = (RESAMPLED, SUB_UPSAMPLED)
    reference_rate: int = REFERENCE_RATE

    def __post_init__(self):
        rates = tuple(sorted({int(r) for r in self.rates}, reverse=True))
        if not rates or any(r <= 0 for r in rates):
            raise InvalidParameter(f"rates must be positive, got {self.rates}")
        if any(r > self.reference_rate for r in rates):
            raise InvalidParameter(f"rates above the reference rate {self.reference_rate} Hz")
        variants = []
        for v in self.variants:
            if v not in VARIANT_ALIASES:
                raise InvalidParameter(f"unknown variant {v!r}")
            if VARIANT_ALIASES[v] not in variants:
                variants.append(VARIANT_ALIASES[v])
        if SUB_UPSAMPLED in variants:
            stray = [r for r in rates if self.reference_rate % r]
            if stray:
                raise InvalidParameter(f"naive subsampling needs rates dividing {self.reference_rate} Hz, got {stray}")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "variants", tuple(variants))

    def conditions(self) -> list[Condition]:
        out = []
        for rate in self.rates:
            if rate == self.reference_rate:
                out.append(Condition(rate, ORIGINAL))
            else:
                out.extend(Condition(rate, v) for v in self.variants)
        return out


def parse_condition(name: str) -> Condition:
    rate, _, variant = name.partition("_")
    try:
        return Condition(int(rate), variant)
    except ValueError as exc:
        raise InvalidParameter(f"bad condition name {name!r}") from exc


# ------------------------------------------------------------------ helpers


def parallel_map(fn: Callable, items: list, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order preserved."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _clean(value):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats -> None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(data, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(rows: list[dict], columns: list[str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else _fmt(row.get(k))) for k in columns})


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def stopband_leakage_db(original: AudioBuffer, degraded: AudioBuffer, low_rate: int) -> float:
    """Energy of ``degraded`` above ``1.25 * low_rate / 2`` relative to the energy of ``original``, in dB.

    NaN when that edge is at or above the Nyquist frequency (nothing to leak into).
    """
    edge = STOPBAND_MARGIN * low_rate / 2.0
    if edge >= degraded.sample_rate / 2.0:
        return math.nan
    spectrum = np.abs(np.fft.rfft(degraded.samples)) ** 2
    freqs = np.fft.rfftfreq(len(degraded), 1.0 / degraded.sample_rate)
    reference = np.sum(original.samples ** 2) * len(original) / 2.0
    leak = spectrum[freqs > edge].sum()
    if reference <= 0:
        return -math.inf if leak == 0 else math.inf
    # Parseval for rfft: sum |X|^2 over one side is ~ N/2 * sum x^2
    return 10.0 * math.log10(max(leak, 1e-300) / reference)


# ------------------------------------------------------------------ degrade


@dataclass
class DegradeResult:
    manifests: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def degraded_filename(entry_id: str, condition: Condition) -> str:
    return f"{entry_id}__{condition.rate}__{condition.variant}.wav"


def run_degrade(entries: list[ManifestEntry], grid: ConditionGrid, out_dir, workers: int = 1,
                zero_crossings: int = DEFAULT_ZERO_CROSSINGS, rolloff: float = DEFAULT_ROLLOFF,
                encoding: str = "float32") -> DegradeResult:
    """Write every entry under every condition of ``grid`` to ``out_dir``.

    Layout: ``out_dir/<rate>_<variant>/<id>__<rate>__<variant>.wav`` plus a
    ``manifest.jsonl`` per condition and ``degrade_summary.json`` at the top.
    Failing files are recorded and skipped.
    """
    out_dir = Path(out_dir)
    conditions = grid.conditions()
    for condition in conditions:
        (out_dir / condition.name).mkdir(parents=True, exist_ok=True)

    def job(entry):
        try:
            audio = read_wav(entry.audio_path)
            if audio.sample_rate != grid.reference_rate:
                raise InvalidParameter(
                    f"sample rate {audio.sample_rate} Hz differs from reference {grid.reference_rate} Hz")
            produced = {}
            for condition in conditions:
                spec = condition.degrade_spec(zero_crossings, rolloff)
                result = degrade(audio, spec)
                target = out_dir / condition.name / degraded_filename(entry.id, condition)
                write_wav(result, target, encoding)
                record = entry.to_json()
                record.update({
                    "audio_path": target.name,
                    "condition": condition.name,
                    "rate": condition.rate,
                    "variant": condition.variant,
                    "source_audio_path": entry.audio_path,
                    "stopband_leakage_db": stopband_leakage_db(audio, result, condition.rate),
                })
                produced[condition.name] = record
            return entry.id, produced, None
        except (SubnyquistError, OSError) as exc:
            return entry.id, None, f"{type(exc).__name__}: {exc}"

    outcomes = sorted(parallel_map(job, list(entries), workers), key=lambda o: o[0])
    result = DegradeResult(manifests={c.name: [] for c in conditions})
    for entry_id, produced, error in outcomes:
        if error is not None:
            result.errors.append({"id": entry_id, "error": error})
            continue
        for name, record in produced.items():
            result.manifests[name].append(record)

    for condition in conditions:
        write_jsonl((_clean(r) for r in result.manifests[condition.name]), out_dir / condition.name / "manifest.jsonl")
    write_json({
        "reference_rate": grid.reference_rate,
        "conditions": [c.name for c in conditions],
        "kernel": {"window": "hann", "zero_crossings": zero_crossings, "rolloff": rolloff},
        "note": "filter width and rolloff are not fixed by the evaluation protocol; results may depend on them",
        "encoding": encoding,
        "n_entries": len(entries),
        "errors": result.errors,
    }, out_dir / "degrade_summary.json")
    return result


# ---------------------------------------------------------- features, pitch


def run_features(entries, kind: str, out_dir, frame: FrameSpec = FrameSpec(), mel: MelSpec = MelSpec(),
                 fmt: str = "bin", workers: int = 1) -> list[dict]:
    """One feature file per entry; returns the per-file error records."""
    if kind not in ("logmel", "spec"):
        raise InvalidParameter(f"kind must be 'logmel' or 'spec', got {kind!r}")
    if fmt not in ("bin", "csv"):
        raise InvalidParameter(f"format must be 'bin' or 'csv', got {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def job(entry):
        try:
            audio = read_wav(entry.audio_path)
            feats = log_mel(audio, frame, mel) if kind == "logmel" else stft_magnitude(audio, frame)
            if fmt == "bin":
                write_feature_bin(feats, out_dir / f"{entry.id}.feat")
            else:
                write_feature_csv(feats, out_dir / f"{entry.id}.csv")
            return None
        except (SubnyquistError, OSError) as exc:
            return {"id": entry.id, "error": f"{type(exc).__name__}: {exc}"}

    return sorted((e for e in parallel_map(job, list(entries), workers) if e), key=lambda e: e["id"])


PITCH_COLUMNS = ["id", "speaker_id", "sex", "mean_f0_hz", "voiced_frames", "n_frames"]


def run_pitch(entries, frame: FrameSpec = FrameSpec(), workers: int = 1, tracks_dir=None):
    """Mean YIN pitch per entry. Returns ``(rows, errors)``."""
    if tracks_dir is not None:
        Path(tracks_dir).mkdir(parents=True, exist_ok=True)

    def job(entry):
        try:
            track = yin_track(read_wav(entry.audio_path), frame=frame)
            if tracks_dir is not None:
                write_track_csv(track, Path(tracks_dir) / f"{entry.id}.csv")
            return {
                "id": entry.id,
                "speaker_id": entry.speaker_id,
                "sex": entry.sex,
                "mean_f0_hz": mean_pitch(track),
                "voiced_frames": int(track.voiced.sum()),
                "n_frames": int(track.f0.size),
            }, None
        except (SubnyquistError, OSError) as exc:
            return None, {"id": entry.id, "error": f"{type(exc).__name__}: {exc}"}

    results = parallel_map(job, list(entries), workers)
    rows = sorted((r for r, _ in results if r), key=lambda r: r["id"])
    errors = sorted((e for _, e in results if e), key=lambda e: e["id"])
    return rows, errors


def load_pitch_csv(path) -> dict:
    """``id -> mean_f0_hz or None`` from a ``pitch`` CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["id"]: (float(row["mean_f0_hz"]) if row["mean_f0_hz"] else None) for row in csv.DictReader(fh)}


def pitch_bin(f0: float | None) -> str | None:
    if f0 is None:
        return None
    for lo, hi in PITCH_BINS:
        if lo <= f0 < hi:
            return f"pitch_{lo:g}_{hi:g}"
    # the top of the search range is a valid estimate
    lo, hi = PITCH_BINS[-1]
    return f"pitch_{lo:g}_{hi:g}" if f0 == hi else None


# --------------------------------------------------------------------- ASR


@dataclass
class GroupedReport:
    """Summary (JSON-ready dict) plus flat rows for per-item CSV exports."""

    summary: dict
    rows: list = field(default_factory=list)
    curves: list = field(default_factory=list)


ASR_COLUMNS = ["condition", "id", "speaker_id", "sex", "mean_f0_hz", "S", "I", "D", "hits", "ref_tokens", "wer"]


def load_hypotheses(path) -> dict:
    hyps = {}
    for line, record in read_jsonl(path):
        if "id" not in record or "text" not in record:
            raise ParseError("hypothesis lines need 'id' and 'text'", line)
        if record["id"] in hyps:
            raise DuplicateId(line, record["id"])
        hyps[str(record["id"])] = str(record["text"])
    return hyps


def _pooled_wer(rows: np.ndarray) -> float:
    refs = rows[:, 1].sum()
    return rows[:, 0].sum() / refs if refs > 0 else math.nan


def _wer_group(records, alpha, n_resamples, seed):
    if not records:
        return {"n_utterances": 0}
    total = asr_metrics.ZERO
    for r in records:
        total = total + r["breakdown"]
    counts = np.array([[r["breakdown"].errors, r["breakdown"].ref_tokens] for r in records], dtype=np.float64)
    group = {"n_utterances": len(records), **total.as_dict(),
             "median_utterance_wer": float(np.median([r["breakdown"].wer for r in records]))}
    if len(records) >= 2:
        group["ci"] = stats.bootstrap_ci(counts, _pooled_wer, alpha, n_resamples, seed).as_dict()
    else:
        group["ci"] = {"point": total.wer, "low": None, "high": None}
    return group


def report_asr(entries: list[ManifestEntry], hyps_by_condition: dict, group_by=("sex",), pitch: dict | None = None,
               alpha: float = 0.05, n_resamples: int = 1000, seed: int = 0,
               tokenizer: Callable[[str], list] = asr_metrics.tokenize) -> GroupedReport:
    """Pooled WER per condition and group with bootstrap intervals.

    ``hyps_by_condition`` maps a condition name to ``{id: text}``. Groups are
    ``all`` plus, depending on ``group_by``, ``F``/``M`` and the pitch bins.
    Each condition also gets a one-sided Mann-Whitney test of utterance WER,
    females greater than males.
    """
    group_by = tuple(group_by)
    for g in group_by:
        if g not in ("sex", "pitch"):
            raise InvalidParameter(f"unknown grouping {g!r}")
    if "pitch" in group_by and pitch is None:
        raise InvalidParameter("grouping by pitch needs per-utterance pitch values")
    by_id = {e.id: e for e in entries}
    scored = [e for e in entries if e.transcript is not None]
    summary = {
        "metric": "wer",
        "definition": "sum(S+I+D) / sum(reference tokens) over utterances",
        "bootstrap": {"unit": "utterance", "alpha": alpha, "n_resamples": n_resamples, "seed": seed,
                      "interval": "percentile"},
        "significance_level": stats.SIGNIFICANCE,
        "group_by": list(group_by),
        "conditions": {},
    }
    rows = []
    for name in sorted(hyps_by_condition):
        hyps = hyps_by_condition[name]
        unknown = set(hyps) - set(by_id)
        if unknown:
            raise UnknownIds(unknown, "manifest")
        missing = [e.id for e in scored if e.id not in hyps]
        if missing:
            raise MissingHypotheses(missing)

        records, empty_refs = [], []
        for entry in sorted(scored, key=lambda e: e.id):
            ref = tokenizer(entry.transcript)
            if not ref:
                empty_refs.append(entry.id)
                continue
            b = asr_metrics.wer_utterance(ref, tokenizer(hyps[entry.id]))
            f0 = pitch.get(entry.id) if pitch else None
            records.append({"entry": entry, "breakdown": b, "f0": f0})
            rows.append({"condition": name, "id": entry.id, "speaker_id": entry.speaker_id, "sex": entry.sex,
                         "mean_f0_hz": f0, **b.as_dict()})
        if empty_refs:
            log.warning("%s: %d empty reference(s) excluded", name, len(empty_refs))

        groups = {"all": _wer_group(records, alpha, n_resamples, seed)}
        cond = {"groups": groups, "excluded_empty_reference": empty_refs}
        if "sex" in group_by:
            female = [r for r in records if r["entry"].sex == "F"]
            male = [r for r in records if r["entry"].sex == "M"]
            groups["F"] = _wer_group(female, alpha, n_resamples, seed)
            groups["M"] = _wer_group(male, alpha, n_resamples, seed)
            cond["excluded_unknown_sex"] = len(records) - len(female) - len(male)
            if female and male:
                test = stats.mann_whitney_u([r["breakdown"].wer for r in female],
                                            [r["breakdown"].wer for r in male], "greater")
                cond["sex_test"] = {**test.as_dict(), "hypothesis": "WER(F) > WER(M)",
                                    "significant": test.significant}
            else:
                cond["sex_test"] = None
        if "pitch" in group_by:
            with_pitch = [r for r in records if pitch_bin(r["f0"]) is not None]
            for lo, hi in PITCH_BINS:
                label = f"pitch_{lo:g}_{hi:g}"
                groups[label] = _wer_group([r for r in with_pitch if pitch_bin(r["f0"]) == label],
                                           alpha, n_resamples, seed)
            cond["excluded_no_pitch"] = len(records) - len(with_pitch)
        summary["conditions"][name] = cond
    return GroupedReport(summary=summary, rows=rows)


# --------------------------------------------------------------------- VAD


ROC_COLUMNS = ["condition", "group", "fpr", "tpr", "threshold"]
VAD_COLUMNS = ["condition", "id", "sex", "group", "n_frames", "tp", "fp", "tn", "fn", "mcc", "auc"]


@dataclass(frozen=True)
class Recording:
    id: str
    frames: vad_metrics.ScoredFrames
    sex: str


def load_vad_scores(path) -> dict:
    """``id -> (frame_rate_hz, scores)``."""
    out = {}
    for line, record in read_jsonl(path):
        try:
            rid = str(record["id"])
            out_value = (float(record["frame_rate_hz"]), np.asarray(record["scores"], dtype=np.float64))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad score record: {exc}", line) from exc
        if rid in out:
            raise DuplicateId(line, rid)
        out[rid] = out_value
    return out


def load_vad_labels(path) -> dict:
    """``id -> record`` with ``segments`` and optional ``n_frames``/``duration_s``."""
    out = {}
    for line, record in read_jsonl(path):
        if "id" not in record or "segments" not in record:
            raise ParseError("label lines need 'id' and 'segments'", line)
        rid = str(record["id"])
        if rid in out:
            raise DuplicateId(line, rid)
        out[rid] = record
    return out


def _recording_labels(label, n_frames, frame_rate):
    if "n_frames" in label and int(label["n_frames"]) != n_frames:
        raise LengthMismatch(f"{n_frames} scores vs {label['n_frames']} labelled frames")
    if "duration_s" in label:
        expected = float(label["duration_s"]) * frame_rate
        if abs(expected - n_frames) > 1.0:
            raise LengthMismatch(f"{n_frames} scores vs {expected:.1f} frames implied by duration")
    return vad_metrics.rasterize_segments(label["segments"], n_frames, frame_rate)


def _auc_of(recordings):
    def statistic(indices):
        frames = vad_metrics.ScoredFrames.concat(recordings[int(i)].frames for i in indices)
        if frames.n_pos == 0 or frames.n_neg == 0:
            return math.nan
        return vad_metrics.auc(vad_metrics.roc(frames))
    return statistic


def _mcc_of(confusions):
    def statistic(indices):
        total = vad_metrics.ConfusionCounts()
        for i in indices:
            total = total + confusions[int(i)]
        return vad_metrics.mcc(total)
    return statistic


def _vad_group(recordings, threshold, alpha, n_resamples, seed):
    group = {"n_recordings": len(recordings)}
    if not recordings:
        return group, None
    confusions = [vad_metrics.confusion(r.frames, threshold) for r in recordings]
    total = vad_metrics.ConfusionCounts()
    for c in confusions:
        total = total + c
    frames = vad_metrics.ScoredFrames.concat(r.frames for r in recordings)
    group.update({"n_frames": len(frames), "confusion": total.as_dict(), "mcc": vad_metrics.mcc(total)})
    index = np.arange(len(recordings))
    curve = None
    if frames.n_pos and frames.n_neg:
        curve = vad_metrics.roc(frames)
        group["auc"] = vad_metrics.auc(curve)
    else:
        group["auc"] = None
    if len(recordings) >= 2:
        group["mcc_ci"] = stats.bootstrap_ci(index, _mcc_of(confusions), alpha, n_resamples, seed).as_dict()
        if curve is not None:
            group["auc_ci"] = stats.bootstrap_ci(index, _auc_of(recordings), alpha, n_resamples, seed).as_dict()
    return group, curve


def report_vad(scores_by_condition: dict, labels: dict, entries: list[ManifestEntry] | None = None,
               threshold: float = VAD_THRESHOLD, alpha: float = 0.05, n_resamples: int = 1000,
               seed: int = 0) -> GroupedReport:
    """AUC, MCC and ROC per condition and sex group.

    Recordings whose manifest sex is ``unknown`` (multiple speakers or noise
    only) form the ``excluded`` group: they count towards ``all`` but not
    towards ``F`` or ``M``. Per-recording problems are collected in
    ``errors`` rather than raised.
    """
    sex_of = {e.id: e.sex for e in entries} if entries is not None else {}
    summary = {
        "metrics": ["auc", "mcc"],
        "threshold": threshold,
        "decision_rule": "score >= threshold",
        "label_rule": "frame positive when its centre lies in a speech segment",
        "bootstrap": {"unit": "recording", "alpha": alpha, "n_resamples": n_resamples, "seed": seed,
                      "interval": "percentile"},
        "conditions": {},
    }
    rows, curves, errors = [], [], []
    for name in sorted(scores_by_condition):
        scores = scores_by_condition[name]
        recordings = []
        for rid in sorted(scores):
            frame_rate, values = scores[rid]
            try:
                if rid not in labels:
                    raise UnknownIds([rid], "labels")
                if entries is not None and rid not in sex_of:
                    raise UnknownIds([rid], "manifest")
                frames = vad_metrics.ScoredFrames(values, _recording_labels(labels[rid], values.size, frame_rate))
            except SubnyquistError as exc:
                errors.append({"condition": name, "id": rid, "error": f"{type(exc).__name__}: {exc}"})
                continue
            recordings.append(Recording(rid, frames, sex_of.get(rid, "unknown")))

        partition = {
            "all": recordings,
            "F": [r for r in recordings if r.sex == "F"],
            "M": [r for r in recordings if r.sex == "M"],
            "excluded": [r for r in recordings if r.sex not in ("F", "M")],
        }
        groups = {}
        for label, members in partition.items():
            groups[label], curve = _vad_group(members, threshold, alpha, n_resamples, seed)
            if curve is not None:
                curves.extend({"condition": name, "group": label, "fpr": float(f), "tpr": float(t),
                               "threshold": float(th)}
                              for f, t, th in zip(curve.fpr, curve.tpr, curve.thresholds))
        for r in recordings:
            c = vad_metrics.confusion(r.frames, threshold)
            has_both = r.frames.n_pos and r.frames.n_neg
            rows.append({"condition": name, "id": r.id, "sex": r.sex,
                         "group": r.sex if r.sex in ("F", "M") else "excluded", "n_frames": len(r.frames),
                         **c.as_dict(), "mcc": vad_metrics.mcc(c),
                         "auc": vad_metrics.auc(vad_metrics.roc(r.frames)) if has_both else None})
        summary["conditions"][name] = {"groups": groups}
    summary["errors"] = errors
    return GroupedReport(summary=summary, rows=rows, curves=curves)


def write_report(report: GroupedReport, out_path, row_columns: list[str], rows_suffix: str) -> list[Path]:
    """Write ``report.json`` and sibling CSVs; returns the paths written."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_json(report.summary, out_path)
    written = [out_path]
    stem = out_path.with_suffix("")
    rows_path = Path(f"{stem}_{rows_suffix}.csv")
    write_csv(report.rows, row_columns, rows_path)
    written.append(rows_path)
    if report.curves:
        roc_path = Path(f"{stem}_roc.csv")
        write_csv(report.curves, ROC_COLUMNS, roc_path)
        written.append(roc_path)
    return written
