"""Nonparametric k-sample comparison on ranks (Kruskal-Wallis H).

Ties receive average ranks and the statistic is divided by the standard tie
correction 1 - sum(t^3 - t) / (N^3 - N). The p-value uses the chi-square
upper tail with k-1 degrees of freedom.
"""

from __future__ import annotations

import math
from typing import Sequence

from pydantic import BaseModel, ConfigDict
from scipy.stats import chi2


class KWResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    H: float
    df: int
    p_value: float
    tie_corrected: bool
    degenerate: bool = False


class DegenerateInput(ValueError):
    pass


def _average_ranks(pooled: Sequence[float]) -> tuple[list[float], float]:
    """Ranks (1-based, ties averaged) in input order, plus sum(t^3 - t)."""
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    tie_term = 0.0
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        avg = (i + j + 2) / 2  # average of 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        t = j - i + 1
        if t > 1:
            tie_term += t**3 - t
        i = j + 1
    return ranks, tie_term


def kruskal_wallis(samples: Sequence[Sequence[float]]) -> KWResult:
    """H over k groups of observations.

    All-identical values across every group are a degenerate input: the
    result is flagged with H = 0 and p = 1 instead of dividing by zero.
    """
    k = len(samples)
    if k < 2:
        raise ValueError("need at least two groups")
    sizes = [len(s) for s in samples]
    if any(n == 0 for n in sizes):
        raise ValueError("every group must be nonempty")
    n_total = sum(sizes)
    if n_total < k:
        raise ValueError("need at least as many observations as groups")

    pooled: list[float] = [float(x) for sample in samples for x in sample]
    ranks, tie_term = _average_ranks(pooled)

    rank_sums = []
    offset = 0
    for n in sizes:
        rank_sums.append(math.fsum(ranks[offset : offset + n]))
        offset += n

    s = math.fsum(r * r / n for r, n in zip(rank_sums, sizes))
    # Single final division keeps clean integer cases exact in floats.
    h = (12.0 * s - 3.0 * (n_total + 1) * n_total * (n_total + 1)) / (
        n_total * (n_total + 1)
    )

    correction = 1.0 - tie_term / (n_total**3 - n_total)
    if correction == 0.0:
        return KWResult(H=0.0, df=k - 1, p_value=1.0, tie_corrected=True, degenerate=True)
    if tie_term:
        h /= correction
    h = max(h, 0.0)  # guard tiny negative rounding residue

    p = float(chi2.sf(h, k - 1))
    return KWResult(H=h, df=k - 1, p_value=p, tie_corrected=bool(tie_term))
