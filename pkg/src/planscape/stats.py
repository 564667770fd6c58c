"""Significance tests for comparing landscape metrics.

Normal tails use ``math.erfc``; quantiles use ``statistics.NormalDist.inv_cdf``
(Wichura's AS241 rational approximation, accurate to about 1e-16).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .errors import DomainError

_STD_NORMAL = NormalDist()


def normal_two_sided_p(z: float) -> float:
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


def normal_quantile(q: float) -> float:
    return _STD_NORMAL.inv_cdf(q)


def fisher_z(r: float) -> float:
    if not -1.0 < r < 1.0:
        raise DomainError(f"Fisher transform needs |r| < 1, got {r}")
    return math.atanh(r)


@dataclass(frozen=True)
class CorrelationTestResult:
    r1: float
    r2: float
    n1: float
    n2: float
    z_stat: float
    p_value: float
    zou_interval: tuple[float, float]
    alpha: float

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha

    @property
    def interval_significant(self) -> bool:
        lo, hi = self.zou_interval
        return not lo <= 0.0 <= hi

    @property
    def verdicts_agree(self) -> bool:
        return self.significant == self.interval_significant


def correlation_diff_test(r1: float, n1: float, r2: float, n2: float,
                          alpha: float = 0.05) -> CorrelationTestResult:
    """Compare two independent correlations.

    The p-value comes from the two-sample Fisher z test; the interval for
    ``r1 - r2`` is Zou's (2007) construction from the per-correlation
    back-transformed limits.
    """
    if n1 <= 3 or n2 <= 3:
        raise DomainError(f"need more than 3 observations per correlation, got {n1} and {n2}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    z1, z2 = fisher_z(r1), fisher_z(r2)
    se1, se2 = 1 / math.sqrt(n1 - 3), 1 / math.sqrt(n2 - 3)
    z_stat = (z1 - z2) / math.hypot(se1, se2)
    q = normal_quantile(1 - alpha / 2)
    l1, u1 = math.tanh(z1 - q * se1), math.tanh(z1 + q * se1)
    l2, u2 = math.tanh(z2 - q * se2), math.tanh(z2 + q * se2)
    diff = r1 - r2
    lower = diff - math.hypot(r1 - l1, u2 - r2)
    upper = diff + math.hypot(u1 - r1, r2 - l2)
    return CorrelationTestResult(r1, r2, n1, n2, z_stat, normal_two_sided_p(z_stat), (lower, upper), alpha)


def mean_fisher_z(rs: Sequence[float]) -> float:
    return float(np.mean([fisher_z(r) for r in rs]))


def pooled_correlation_test(rs1: Sequence[float], n1: int, rs2: Sequence[float], n2: int,
                            alpha: float = 0.05) -> CorrelationTestResult:
    """Compare two groups of repeated correlations, each estimated from ``n`` pairs.

    Each group is summarised by the mean of its Fisher z values, with variance
    ``1 / (n - 3) / k`` for ``k`` repeats. That is the variance of a single
    correlation from ``3 + k (n - 3)`` pairs, so the test reduces to
    ``correlation_diff_test`` on ``tanh(mean z)`` with that effective size.
    """
    if not rs1 or not rs2:
        raise DomainError("each group needs at least one correlation")
    eff1 = 3 + len(rs1) * (n1 - 3)
    eff2 = 3 + len(rs2) * (n2 - 3)
    return correlation_diff_test(math.tanh(mean_fisher_z(rs1)), eff1,
                                 math.tanh(mean_fisher_z(rs2)), eff2, alpha)


@dataclass(frozen=True)
class RankSumResult:
    u_stat: float
    z_stat: float
    p_value: float
    n1: int
    n2: int
    tie_corrected: bool
    reliable: bool


def rankdata(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1, ties receiving the mean of the ranks they span."""
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_rank_sum(xs: Sequence[float], ys: Sequence[float], continuity: bool = True) -> RankSumResult:
    """Two-sided rank-sum test with the tie-corrected normal approximation.

    ``u_stat`` is the U statistic of ``xs``. Fewer than three observations on
    either side marks the result as unreliable.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise DomainError("rank-sum test needs two non-empty samples")
    ranks = rankdata(np.concatenate([x, y]))
    u1 = float(ranks[:n1].sum()) - n1 * (n1 + 1) / 2
    n = n1 + n2
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts.astype(float) ** 3 - tie_counts))
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    reliable = n1 >= 3 and n2 >= 3
    if var <= 0:
        return RankSumResult(u1, 0.0, 1.0, n1, n2, True, reliable)
    delta = u1 - n1 * n2 / 2
    magnitude = abs(delta)
    if continuity:
        magnitude = max(magnitude - 0.5, 0.0)
    z = math.copysign(magnitude / math.sqrt(var), delta) if magnitude else 0.0
    return RankSumResult(u1, z, normal_two_sided_p(z), n1, n2, True, reliable)


def significance_marker(p: float) -> str:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p-value {p} outside [0, 1]")
    if p < 1e-4:
        return "◇"
    if p < 0.05:
        return "*"
    return ""
