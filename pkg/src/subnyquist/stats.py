"""Percentile bootstrap intervals and the Mann-Whitney U test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameter, TooFewItems

SIGNIFICANCE = 0.01
EXACT_MAX_N = 8
ALTERNATIVES = ("greater", "less", "two_sided")


@dataclass(frozen=True)
class BootstrapCI:
    point: float
    low: float
    high: float
    alpha: float = 0.05
    n_resamples: int = 1000
    seed: int = 0
    n_invalid: int = 0

    def as_dict(self) -> dict:
        return {"point": self.point, "low": self.low, "high": self.high}


@dataclass(frozen=True)
class UTestResult:
    u: float
    p: float
    n1: int
    n2: int
    alternative: str
    exact: bool

    @property
    def significant(self) -> bool:
        return self.p < SIGNIFICANCE

    def as_dict(self) -> dict:
        return {"u": self.u, "p": self.p, "n1": self.n1, "n2": self.n2,
                "alternative": self.alternative, "exact": self.exact}


def resample_indices(n_items: int, n_resamples: int, seed: int) -> np.ndarray:
    """All bootstrap draws at once, row ``b`` being resample ``b``.

    Drawing up front fixes each resample's indices independently of how the
    statistic evaluations are later scheduled.
    """
    rng = np.random.default_rng(seed)
    return rng.integers(0, n_items, size=(n_resamples, n_items))


def bootstrap_ci(items: Sequence, statistic: Callable, alpha: float = 0.05, n_resamples: int = 1000,
                 seed: int = 0) -> BootstrapCI:
    """Percentile bootstrap interval of ``statistic`` over resampled ``items``.

    ``statistic`` receives a numpy array of the resampled items (rows, when
    items are records). Resamples where it returns a non-finite value are
    left out of the percentiles and counted in ``n_invalid``.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha}")
    if n_resamples < 1:
        raise InvalidParameter("n_resamples must be >= 1")
    try:
        data = np.asarray(items, dtype=np.float64)
    except (TypeError, ValueError):
        data = np.empty(len(items), dtype=object)
        data[:] = list(items)
    n = data.shape[0]
    if n < 2:
        raise TooFewItems(f"bootstrap needs at least 2 items, got {n}")

    point = float(statistic(data))
    draws = resample_indices(n, n_resamples, seed)
    values = np.array([statistic(data[row]) for row in draws], dtype=np.float64)
    valid = values[np.isfinite(values)]
    if valid.size == 0:
        low = high = math.nan
    else:
        low, high = np.percentile(valid, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return BootstrapCI(point=point, low=float(low), high=float(high), alpha=alpha,
                       n_resamples=n_resamples, seed=seed, n_invalid=int(values.size - valid.size))


def u_statistic(a, b) -> float:
    """Pairs with ``a_i > b_j`` plus half the tied pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.sort(np.asarray(b, dtype=np.float64))
    below = np.searchsorted(b, a, side="left")
    at_or_below = np.searchsorted(b, a, side="right")
    return float(np.sum(below) + 0.5 * np.sum(at_or_below - below))


def u_null_counts(n1: int, n2: int) -> list[int]:
    """Number of arrangements giving each U = 0 .. n1*n2 when there are no ties.

    These are the coefficients of the Gaussian binomial ``[n1 + n2 choose n1]_q``,
    built as prod_{i=1..m} (1 - q^(n+i)) / (1 - q^i) with m = min(n1, n2).
    """
    m, n = sorted((n1, n2))
    size = m * n + 1
    poly = [0] * size
    poly[0] = 1
    for i in range(1, m + 1):
        # multiply by (1 - q^(n+i)), truncating above degree m*n
        shift = n + i
        for k in range(size - 1, shift - 1, -1):
            poly[k] -= poly[k - shift]
        # divide by (1 - q^i): running sum with stride i
        for k in range(i, size):
            poly[k] += poly[k - i]
    return poly


def _exact_p(u: float, n1: int, n2: int, alternative: str) -> float:
    counts = u_null_counts(n1, n2)
    total = sum(counts)
    k = int(round(u))
    upper = sum(counts[k:]) / total
    lower = sum(counts[:k + 1]) / total
    if alternative == "greater":
        return upper
    if alternative == "less":
        return lower
    return min(1.0, 2.0 * min(upper, lower))


def _normal_p(u: float, a: np.ndarray, b: np.ndarray, alternative: str) -> float:
    n1, n2 = a.size, b.size
    n = n1 + n2
    _, tie_sizes = np.unique(np.concatenate([a, b]), return_counts=True)
    tie_term = float(np.sum(tie_sizes.astype(np.float64) ** 3 - tie_sizes))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    mu = n1 * n2 / 2.0

    def sf(z):
        return 0.5 * math.erfc(z / math.sqrt(2.0))

    if alternative == "greater":
        return sf((u - mu - 0.5) / sd)
    if alternative == "less":
        return sf((mu - u - 0.5) / sd)
    return min(1.0, 2.0 * sf((abs(u - mu) - 0.5) / sd))


def mann_whitney_u(a, b, alternative: str = "greater") -> UTestResult:
    """Mann-Whitney U test of ``a`` against ``b``.

    ``greater`` asks whether ``a`` tends to exceed ``b``. The p-value is exact
    (from the null distribution of U) when the smaller sample has at most 8
    values and there are no ties; otherwise it uses the normal approximation
    with tie-corrected variance and a 0.5 continuity correction.
    """
    if alternative not in ALTERNATIVES:
        raise InvalidParameter(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.size == 0 or b.size == 0:
        raise TooFewItems("both samples need at least one value")
    u = u_statistic(a, b)
    has_ties = np.unique(np.concatenate([a, b])).size < a.size + b.size
    exact = min(a.size, b.size) <= EXACT_MAX_N and not has_ties
    p = _exact_p(u, a.size, b.size, alternative) if exact else _normal_p(u, a, b, alternative)
    return UTestResult(u=u, p=float(min(1.0, max(0.0, p))), n1=int(a.size), n2=int(b.size),
                       alternative=alternative, exact=exact)
