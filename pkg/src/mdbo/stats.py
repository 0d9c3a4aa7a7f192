"""Descriptive statistics, Wilcoxon rank-sum test and box-plot summaries."""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "rankdata",
    "wilcoxon_rank_sum",
    "significance_mark",
    "SignificanceMark",
    "describe",
    "BoxplotStats",
    "boxplot_stats",
]

EXACT_LIMIT = 400


def rankdata(values):
    """1-based ranks with ties given their average (mid) rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(values.size)
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and sorted_vals[stop] == sorted_vals[start]:
            stop += 1
        ranks[order[start:stop]] = 0.5 * (start + stop + 1)
        start = stop
    return ranks


def _rank_sum_counts(doubled_ranks, n):
    """Number of n-subsets of ``doubled_ranks`` reaching each possible sum.

    Works on doubled ranks so midranks stay integral.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros((n + 1, total + 1), dtype=np.int64)
    counts[0, 0] = 1
    for seen, r in enumerate(doubled_ranks, start=1):
        for k in range(min(seen, n), 0, -1):
            counts[k, r:] += counts[k - 1, : total + 1 - r]
    return counts[n]


def _exact_p(a_ranks, all_ranks):
    doubled = np.rint(2 * all_ranks).astype(np.int64)
    observed = int(round(2 * a_ranks.sum()))
    counts = _rank_sum_counts(doubled, a_ranks.size).astype(float)
    total = counts.sum()
    lower = counts[: observed + 1].sum() / total
    upper = counts[observed:].sum() / total
    return min(1.0, 2.0 * min(lower, upper))


def _normal_p(a_ranks, all_ranks, n, m):
    u = a_ranks.sum() - n * (n + 1) / 2.0
    big_n = n + m
    _, ties = np.unique(all_ranks, return_counts=True)
    tie_term = np.sum(ties**3 - ties) / (big_n * (big_n - 1)) if big_n > 1 else 0.0
    var = n * m / 12.0 * ((big_n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (abs(u - n * m / 2.0) - 0.5) / math.sqrt(var)
    return min(1.0, math.erfc(max(z, 0.0) / math.sqrt(2.0)))


def wilcoxon_rank_sum(a, b, method="auto"):
    """Two-sided p-value of the Wilcoxon rank-sum (Mann-Whitney) test.

    ``method="auto"`` uses the exact permutation distribution of the rank sum
    (midranks for ties) when ``len(a) * len(b) <= 400`` and the normal
    approximation with tie and continuity corrections otherwise.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if method not in ("auto", "exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    ranks = rankdata(np.concatenate([a, b]))
    a_ranks = ranks[: a.size]
    if method == "exact" or (method == "auto" and a.size * b.size <= EXACT_LIMIT):
        return _exact_p(a_ranks, ranks)
    return _normal_p(a_ranks, ranks, a.size, b.size)


@dataclass(frozen=True)
class SignificanceMark:
    p_value: float
    mark: str


def significance_mark(p_value, mean_mdbo, mean_other, level=0.05):
    """'+' when MDBO is significantly better, '-' when worse, '=' otherwise."""
    if not (p_value < level) or mean_mdbo == mean_other:
        return SignificanceMark(float(p_value), "=")
    return SignificanceMark(float(p_value), "+" if mean_mdbo < mean_other else "-")


def describe(values):
    """Mean, sample standard deviation (n - 1), best and worst of a sample."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty sample")
    std = float(np.std(values, ddof=1)) if values.size > 1 else float("nan")
    return {
        "mean": float(np.mean(values)),
        "std": std,
        "best": float(np.min(values)),
        "worst": float(np.max(values)),
    }


@dataclass(frozen=True)
class BoxplotStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outliers: tuple


def boxplot_stats(values, whis=1.5):
    """Five-number summary with Tukey fences.

    Quartiles use linear interpolation between order statistics (Hyndman-Fan
    type 7). Whiskers reach the most extreme data inside
    ``[q1 - whis * iqr, q3 + whis * iqr]``; anything beyond is an outlier.
    """
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if values.size == 0:
        raise ValueError("empty sample")
    q1, median, q3 = np.percentile(values, [25, 50, 75], method="linear")
    iqr = q3 - q1
    low_fence, high_fence = q1 - whis * iqr, q3 + whis * iqr
    inside = values[(values >= low_fence) & (values <= high_fence)]
    outliers = values[(values < low_fence) | (values > high_fence)]
    return BoxplotStats(
        min=float(values[0]),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        max=float(values[-1]),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
    )
