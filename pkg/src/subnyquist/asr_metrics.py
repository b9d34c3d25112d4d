"""Word error rate scoring with explicit edit-operation alignment."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import EmptyReference, NoValidPairs

log = logging.getLogger(__name__)

STRIP_CHARS = '.,!?;:"'


class Op(str, Enum):
    HIT = "hit"
    SUB = "sub"
    DEL = "del"
    INS = "ins"


@dataclass(frozen=True)
class EditOp:
    op: Op
    ref: str | None
    hyp: str | None


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    insertions: int
    deletions: int
    hits: int
    ref_tokens: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def hyp_tokens(self) -> int:
        return self.hits + self.substitutions + self.insertions

    @property
    def wer(self) -> float:
        if self.ref_tokens == 0:
            raise EmptyReference("WER is undefined for an empty reference")
        return self.errors / self.ref_tokens

    def __add__(self, other: "WerBreakdown") -> "WerBreakdown":
        return WerBreakdown(
            self.substitutions + other.substitutions,
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.hits + other.hits,
            self.ref_tokens + other.ref_tokens,
        )

    def as_dict(self) -> dict:
        return {
            "S": self.substitutions,
            "I": self.insertions,
            "D": self.deletions,
            "hits": self.hits,
            "ref_tokens": self.ref_tokens,
            "wer": self.wer,
        }


ZERO = WerBreakdown(0, 0, 0, 0, 0)


def tokenize(text: str) -> list[str]:
    """Uppercase, split on whitespace, strip ``.,!?;:"`` from token ends.

    Apostrophes stay (``it's`` -> ``IT'S``); tokens that are pure punctuation
    disappear.
    """
    tokens = (tok.strip(STRIP_CHARS) for tok in text.upper().split())
    return [tok for tok in tokens if tok]


def edit_distance_table(ref: Sequence[str], hyp: Sequence[str]):
    n, m = len(ref), len(hyp)
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = i
    for j in range(1, m + 1):
        cost[0][j] = j
    for i in range(1, n + 1):
        row, prev = cost[i], cost[i - 1]
        r = ref[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (r != hyp[j - 1])
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)
    return cost


def align(ref: Sequence[str], hyp: Sequence[str]) -> list[EditOp]:
    """Minimum-cost alignment as a list of edit operations in reading order.

    Among equal-cost alignments the backtrace prefers, at each step from the
    end, hit, then substitution, then deletion, then insertion.
    """
    cost = edit_distance_table(ref, hyp)
    ops = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if same and cost[i - 1][j - 1] == here:
                ops.append(EditOp(Op.HIT, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
            if not same and cost[i - 1][j - 1] + 1 == here:
                ops.append(EditOp(Op.SUB, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and cost[i - 1][j] + 1 == here:
            ops.append(EditOp(Op.DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(Op.INS, None, hyp[j - 1]))
            j -= 1
    ops.reverse()
    return ops


def alignment_cost(ops: Iterable[EditOp]) -> int:
    return sum(op.op is not Op.HIT for op in ops)


def breakdown(ops: Iterable[EditOp]) -> WerBreakdown:
    counts = {op: 0 for op in Op}
    for e in ops:
        counts[e.op] += 1
    return WerBreakdown(
        substitutions=counts[Op.SUB],
        insertions=counts[Op.INS],
        deletions=counts[Op.DEL],
        hits=counts[Op.HIT],
        ref_tokens=counts[Op.HIT] + counts[Op.SUB] + counts[Op.DEL],
    )


def wer_utterance(ref: Sequence[str], hyp: Sequence[str]) -> WerBreakdown:
    if len(ref) == 0:
        raise EmptyReference("reference has no tokens")
    return breakdown(align(ref, hyp))


def wer_corpus(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> WerBreakdown:
    """Pooled corpus WER: summed errors over summed reference tokens.

    Pairs with an empty reference are skipped with a warning.
    """
    total = ZERO
    used = 0
    for index, (ref, hyp) in enumerate(pairs):
        if len(ref) == 0:
            log.warning("skipping pair %d: empty reference", index)
            continue
        total = total + wer_utterance(ref, hyp)
        used += 1
    if used == 0:
        raise NoValidPairs("no pair with a non-empty reference")
    return total


def score_texts(ref_text: str, hyp_text: str, tokenizer: Callable[[str], list[str]] = tokenize) -> WerBreakdown:
    return wer_utterance(tokenizer(ref_text), tokenizer(hyp_text))
