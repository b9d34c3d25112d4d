"""Frame-level VAD scoring: confusion counts, ROC, AUC and MCC."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels, InvalidParameter, LengthMismatch


@dataclass(frozen=True, eq=False)
class ScoredFrames:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        labels = np.asarray(self.labels).reshape(-1)
        if scores.shape != labels.shape:
            raise LengthMismatch(f"{scores.size} scores vs {labels.size} labels")
        if not np.all((labels == 0) | (labels == 1)):
            raise InvalidParameter("labels must be 0 or 1")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int8))

    def __len__(self):
        return self.scores.size

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return len(self) - self.n_pos

    @classmethod
    def concat(cls, parts):
        parts = list(parts)
        if not parts:
            return cls(np.zeros(0), np.zeros(0, dtype=np.int8))
        return cls(np.concatenate([p.scores for p in parts]), np.concatenate([p.labels for p in parts]))


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True, eq=False)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def confusion(frames: ScoredFrames, threshold: float = 0.5) -> ConfusionCounts:
    """Tally decisions ``score >= threshold`` against the labels."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidParameter(f"threshold must lie in [0, 1], got {threshold}")
    predicted = frames.scores >= threshold
    actual = frames.labels == 1
    tp = int(np.count_nonzero(predicted & actual))
    fp = int(np.count_nonzero(predicted & ~actual))
    fn = int(np.count_nonzero(~predicted & actual))
    return ConfusionCounts(tp=tp, fp=fp, tn=len(frames) - tp - fp - fn, fn=fn)


def roc(frames: ScoredFrames) -> RocCurve:
    """ROC over every distinct score, swept from high to low.

    Equal scores move together as one step, which is what gives ties half
    credit in the area. The first point is (0, 0) with threshold +inf.
    """
    n_pos, n_neg = frames.n_pos, frames.n_neg
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} positive and {n_neg} negative frames")
    order = np.argsort(-frames.scores, kind="mergesort")
    scores = frames.scores[order]
    labels = frames.labels[order]
    tps = np.cumsum(labels, dtype=np.int64)
    fps = np.arange(1, scores.size + 1) - tps
    # last index of each run of equal scores
    last = np.r_[np.nonzero(np.diff(scores))[0], scores.size - 1]
    fpr = np.r_[0.0, fps[last] / n_neg]
    tpr = np.r_[0.0, tps[last] / n_pos]
    thresholds = np.r_[np.inf, scores[last]]
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve."""
    dx = np.diff(curve.fpr)
    return float(np.sum(dx * (curve.tpr[1:] + curve.tpr[:-1]) / 2.0))


def mcc(c: ConfusionCounts) -> float:
    """Matthews correlation; 0 when any marginal is empty."""
    factors = (c.tp + c.fp, c.tp + c.fn, c.tn + c.fp, c.tn + c.fn)
    if 0 in factors:
        return 0.0
    denom = math.sqrt(float(factors[0]) * factors[1] * factors[2] * factors[3])
    return (c.tp * c.tn - c.fp * c.fn) / denom


def rasterize_segments(segments, n_frames: int, frame_rate_hz: float) -> np.ndarray:
    """Frame labels from ``[(start_s, end_s), ...]``.

    A frame is speech when its centre, ``(i + 0.5) / frame_rate_hz``, lies in
    ``[start_s, end_s)`` of some segment.
    """
    centres = (np.arange(n_frames) + 0.5) / frame_rate_hz
    labels = np.zeros(n_frames, dtype=np.int8)
    for start, end in segments:
        labels[(centres >= start) & (centres < end)] = 1
    return labels
