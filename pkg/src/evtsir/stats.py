"""Empirical distribution tools: ECDF, KS distance, Freedman-Diaconis
histograms and a histogram estimate of the KL divergence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Histogram",
    "KLResult",
    "ecdf",
    "ks_distance",
    "fd_bin_count",
    "fd_bins",
    "histogram",
    "empirical_kl",
]


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram over ``[lo, hi]``.

    Only occupied bins are stored: ``index[k]`` is the bin number holding
    ``count[k]`` samples.  This keeps millions of nominal bins cheap when a
    heavy tail stretches the range.
    """

    lo: float
    hi: float
    bins: int
    index: np.ndarray = field(repr=False)
    count: np.ndarray = field(repr=False)
    n: int

    def __post_init__(self):
        if self.bins < 1 or not self.lo < self.hi:
            raise ValueError("histogram needs bins >= 1 and lo < hi")

    @property
    def counts(self) -> np.ndarray:
        """Dense count vector of length ``bins``."""
        out = np.zeros(self.bins, dtype=np.int64)
        out[self.index] = self.count
        return out


@dataclass(frozen=True)
class KLResult:
    value: float
    bins: int
    winsorized: bool
    raw: float


def ecdf(samples, z):
    """Right-continuous empirical CDF of sorted ``samples`` at ``z``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("ecdf of an empty sample")
    out = np.searchsorted(x, z, side="right") / x.size
    return float(out) if np.ndim(out) == 0 else out


def ks_distance(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance using both sides of each ECDF step."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("ks_distance of an empty sample")
    f = np.asarray(cdf(x), dtype=float)
    # ties: the ECDF jumps once at the last copy of a repeated value
    upper = np.searchsorted(x, x, side="right") / n
    lower = np.searchsorted(x, x, side="left") / n
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(f - lower))))


def fd_bin_count(n: int, iqr: float, span: float) -> int:
    """``ceil(span / (2 iqr n^(-1/3)))``, at least one."""
    if not iqr > 0:
        raise ValueError("interquartile range is zero; sample is degenerate")
    width = 2.0 * iqr / np.cbrt(n)
    return max(1, math.ceil(span / width - 1e-9))


def fd_bins(samples) -> int:
    x = np.asarray(samples, dtype=float)
    if x.size < 4:
        raise ValueError("Freedman-Diaconis rule needs at least four samples")
    q1, q3 = np.percentile(x, [25, 75])
    return fd_bin_count(x.size, q3 - q1, float(x.max() - x.min()))


def histogram(samples, lo: float, hi: float, bins: int) -> Histogram:
    if bins < 1 or not lo < hi:
        raise ValueError("histogram needs bins >= 1 and lo < hi")
    x = np.asarray(samples, dtype=float)
    inside = x[(x >= lo) & (x <= hi)]
    idx = np.floor((inside - lo) / (hi - lo) * bins).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    index, count = np.unique(idx, return_counts=True)
    return Histogram(lo, hi, bins, index, count, int(x.size))


def empirical_kl(
    p_samples,
    q_samples,
    pseudo_count: float = 0.5,
    winsorize: float | None = None,
) -> KLResult:
    """Histogram estimate of ``KL(P || Q)``.

    Both samples share ``W`` equal bins over the union of their ranges, where
    ``W`` is the larger of their Freedman-Diaconis counts.  The estimate is
    ``sum_i (u_i/n) ln(u_i/v_i)`` over bins with ``u_i > 0``; an empty ``v_i``
    is replaced by ``pseudo_count``.  ``winsorize`` (e.g. 0.9999) clips both
    samples at that quantile of the pooled data before binning.
    """
    p = np.asarray(p_samples, dtype=float).ravel()
    q = np.asarray(q_samples, dtype=float).ravel()
    if p.size != q.size:
        raise ValueError("empirical_kl expects equal sample counts")
    if p.size < 100:
        raise ValueError("empirical_kl needs at least 100 samples per set")
    if winsorize is not None:
        if not 0.5 < winsorize < 1:
            raise ValueError("winsorize level must lie in (0.5, 1)")
        cap = float(np.quantile(np.concatenate([p, q]), winsorize))
        p, q = np.minimum(p, cap), np.minimum(q, cap)
    lo = float(min(p.min(), q.min()))
    hi = float(max(p.max(), q.max()))
    counts = []
    for x in (p, q):
        try:
            counts.append(fd_bins(x))
        except ValueError:
            pass
    if not counts:
        raise ValueError("both samples have zero interquartile range")
    W = max(counts)
    hp, hq = histogram(p, lo, hi, W), histogram(q, lo, hi, W)
    pos = np.searchsorted(hq.index, hp.index)
    pos = np.minimum(pos, max(hq.index.size - 1, 0))
    hit = hq.index.size > 0
    v = np.where(hit & (hq.index[pos] == hp.index), hq.count[pos], 0).astype(float)
    v[v == 0] = pseudo_count
    u = hp.count.astype(float)
    raw = float(np.sum(u / p.size * np.log(u / v)))
    if raw < -1e-6:
        raise ArithmeticError(f"empirical KL came out negative ({raw})")
    return KLResult(max(raw, 0.0), W, winsorize is not None, raw)
