"""Command-line entry point: ``subnyquist <command> ...``.

Exit status is 0 on success, 1 when some files failed (the rest are still
processed and the failures listed in the outputs), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import corpus
from .errors import SubnyquistError
from .features import FrameSpec

log = logging.getLogger("subnyquist")


def _csv_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _named_paths(values):
    """``NAME=PATH`` or bare ``PATH`` (named after the file stem)."""
    named = {}
    for value in values:
        name, sep, path = value.partition("=")
        if not sep:
            name, path = Path(value).stem, value
        if name in named:
            raise SubnyquistError(f"condition {name!r} given twice")
        named[name] = path
    return named


def _add_common(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0), help="bootstrap seed (default 0)")
    parser.add_argument("--workers", type=int, default=default(1), help="parallel file workers (default 1)")
    parser.add_argument("--frame-ms", type=float, default=default(25.0), help="analysis window in ms (default 25)")
    parser.add_argument("--hop-ms", type=float, default=default(10.0), help="hop in ms (default 10)")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subnyquist", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", parents=[common], help="write degraded copies of a corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--rates", type=_csv_list, default=["1600", "800", "500", "320"],
                   help="comma-separated low rates in Hz; include the reference rate for a pass-through copy")
    p.add_argument("--variants", type=_csv_list, default=["aa", "alias"],
                   help="aa (anti-aliased resampling) and/or alias (naive subsampling)")
    p.add_argument("--reference-rate", type=int, default=corpus.REFERENCE_RATE)
    p.add_argument("--zero-crossings", type=int, default=6)
    p.add_argument("--rolloff", type=float, default=0.99)
    p.add_argument("--encoding", choices=["float32", "pcm16"], default="float32")
    p.add_argument("--out", required=True)

    p = sub.add_parser("features", parents=[common], help="log-Mel or spectrogram features per file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--kind", choices=["logmel", "spec"], default="logmel")
    p.add_argument("--format", choices=["bin", "csv"], default="bin")
    p.add_argument("--n-mels", type=int, default=80)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pitch", parents=[common], help="mean YIN pitch per utterance")
    p.add_argument("--manifest", required=True)
    p.add_argument("--tracks", help="directory for per-frame pitch CSVs")
    p.add_argument("--out", required=True)

    p = sub.add_parser("score-asr", parents=[common], help="WER report from ASR hypotheses")
    p.add_argument("--refs", required=True, help="manifest with transcripts")
    p.add_argument("--hyps", action="append", required=True,
                   help="[CONDITION=]hyps.jsonl, repeatable; condition defaults to the file stem")
    p.add_argument("--group-by", type=_csv_list, default=["sex"])
    p.add_argument("--pitch", help="CSV from the pitch command; computed from audio when omitted")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-resamples", type=int, default=1000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("score-vad", parents=[common], help="AUC/MCC/ROC report from VAD posteriors")
    p.add_argument("--scores", action="append", required=True,
                   help="[CONDITION=]scores.jsonl, repeatable; condition defaults to the file stem")
    p.add_argument("--labels", required=True)
    p.add_argument("--manifest", help="manifest giving the sex of each recording")
    p.add_argument("--threshold", type=float, default=corpus.VAD_THRESHOLD)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-resamples", type=int, default=1000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("demo-corpus", parents=[common], help="write the synthetic 10-utterance corpus")
    p.add_argument("--out", required=True)
    return parser


def _cmd_degrade(args, frame):
    entries = corpus.load_manifest(args.manifest)
    grid = corpus.ConditionGrid(rates=tuple(int(r) for r in args.rates), variants=tuple(args.variants),
                                reference_rate=args.reference_rate)
    result = corpus.run_degrade(entries, grid, args.out, workers=args.workers, zero_crossings=args.zero_crossings,
                                rolloff=args.rolloff, encoding=args.encoding)
    for error in result.errors:
        log.error("%s: %s", error["id"], error["error"])
    return 0 if result.ok else 1


def _cmd_features(args, frame):
    entries = corpus.load_manifest(args.manifest)
    errors = corpus.run_features(entries, args.kind, args.out, frame=frame, mel=corpus.MelSpec(n_mels=args.n_mels),
                                 fmt=args.format, workers=args.workers)
    if errors:
        corpus.write_json({"errors": errors}, Path(args.out) / "errors.json")
    return 1 if errors else 0


def _cmd_pitch(args, frame):
    entries = corpus.load_manifest(args.manifest)
    rows, errors = corpus.run_pitch(entries, frame=frame, workers=args.workers, tracks_dir=args.tracks)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    corpus.write_csv(rows, corpus.PITCH_COLUMNS, args.out)
    for error in errors:
        log.error("%s: %s", error["id"], error["error"])
    return 1 if errors else 0


def _cmd_score_asr(args, frame):
    entries = corpus.load_manifest(args.refs)
    hyps = {name: corpus.load_hypotheses(path) for name, path in _named_paths(args.hyps).items()}
    pitch, status = None, 0
    if "pitch" in args.group_by:
        if args.pitch:
            pitch = corpus.load_pitch_csv(args.pitch)
        else:
            rows, errors = corpus.run_pitch(entries, frame=frame, workers=args.workers)
            pitch = {r["id"]: r["mean_f0_hz"] for r in rows}
            status = 1 if errors else 0
    report = corpus.report_asr(entries, hyps, group_by=args.group_by, pitch=pitch, alpha=args.alpha,
                               n_resamples=args.n_resamples, seed=args.seed)
    corpus.write_report(report, args.out, corpus.ASR_COLUMNS, "utterances")
    return status


def _cmd_score_vad(args, frame):
    scores = {name: corpus.load_vad_scores(path) for name, path in _named_paths(args.scores).items()}
    labels = corpus.load_vad_labels(args.labels)
    entries = corpus.load_manifest(args.manifest) if args.manifest else None
    report = corpus.report_vad(scores, labels, entries, threshold=args.threshold, alpha=args.alpha,
                               n_resamples=args.n_resamples, seed=args.seed)
    corpus.write_report(report, args.out, corpus.VAD_COLUMNS, "recordings")
    for error in report.summary["errors"]:
        log.error("%s/%s: %s", error["condition"], error["id"], error["error"])
    return 1 if report.summary["errors"] else 0


def _cmd_demo(args, frame):
    from .demo import make_mini_corpus

    print(make_mini_corpus(args.out, seed=args.seed))
    return 0


COMMANDS = {
    "degrade": _cmd_degrade,
    "features": _cmd_features,
    "pitch": _cmd_pitch,
    "score-asr": _cmd_score_asr,
    "score-vad": _cmd_score_vad,
    "demo-corpus": _cmd_demo,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        frame = FrameSpec(window_ms=args.frame_ms, hop_ms=args.hop_ms)
        return COMMANDS[args.command](args, frame)
    except SubnyquistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
