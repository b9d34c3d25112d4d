"""Slow, independent reference computations used to check the fast paths."""

import itertools
import math

import numpy as np


def dft_power(x, rate, freqs):
    """|X(f)|^2 by explicit summation of complex exponentials (no FFT)."""
    x = np.asarray(x, dtype=np.float64)
    n = np.arange(x.size)
    basis = np.exp(-2j * np.pi * np.outer(freqs, n) / rate)
    return np.abs(basis @ x) ** 2


def folded_frequency(f, rate):
    return abs(f - rate * round(f / rate))


def exhaustive_edit_distance(ref, hyp):
    """Minimum over every order-preserving matching of ref/hyp positions.

    Matched pairs cost 0 (equal) or 1 (substitution); unmatched tokens on
    either side are deletions or insertions.
    """
    best = len(ref) + len(hyp)
    for k in range(min(len(ref), len(hyp)) + 1):
        for ri in itertools.combinations(range(len(ref)), k):
            for hi in itertools.combinations(range(len(hyp)), k):
                subs = sum(ref[a] != hyp[b] for a, b in zip(ri, hi))
                best = min(best, subs + (len(ref) - k) + (len(hyp) - k))
    return best


def brute_force_roc(scores, labels):
    """(fpr, tpr) at every distinct threshold, via a fresh recount each time."""
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    pos, neg = (labels == 1).sum(), (labels == 0).sum()
    points = [(0.0, 0.0)]
    for thr in sorted(set(scores.tolist()), reverse=True):
        pred = scores >= thr
        points.append((float((pred & (labels == 0)).sum() / neg), float((pred & (labels == 1)).sum() / pos)))
    return points


def rank_sum_u(a, b):
    """Mann-Whitney U from the rank-sum of ``a`` with mid-ranks for ties."""
    values = list(a) + list(b)
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2.0 + 1.0
        i = j + 1
    r1 = sum(ranks[: len(a)])
    return r1 - len(a) * (len(a) + 1) / 2.0


def enumerate_u_pvalue(a, b, alternative):
    """Exact p-value by trying every way of labelling the pooled sample.

    Only for tie-free data: after sorting the pooled values, a labelling that
    puts sample ``a`` at sorted positions ``p_0 < p_1 < ...`` has
    ``U = sum(p_k - k)``.
    """
    pooled = sorted(list(a) + list(b))
    assert len(set(pooled)) == len(pooled), "oracle requires distinct values"
    n1 = len(a)
    observed = sum(x > y for x in a for y in b)
    ge = le = total = 0
    for positions in itertools.combinations(range(len(pooled)), n1):
        u = sum(p - k for k, p in enumerate(positions))
        total += 1
        ge += u >= observed
        le += u <= observed
    if alternative == "greater":
        return ge / total
    if alternative == "less":
        return le / total
    return min(1.0, 2 * min(ge, le) / total)


def mcc_closed_form(tp, fp, tn, fn):
    return (tp * tn - fp * fn) / math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
