"""Empirical distributions of pooled scalar samples."""

from __future__ import annotations

import numpy as np


class EmpiricalDistribution:
    """Sorted sample pool with the usual step CDF.

    sup_distance evaluates the Kolmogorov-Smirnov statistic against a callable
    reference CDF, checking both one-sided gaps at every jump.
    """

    def __init__(self, samples):
        data = np.asarray(samples, dtype=float).ravel()
        if data.size == 0:
            raise ValueError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(data)):
            raise ValueError("samples must be finite")
        self.samples = np.sort(data)
        self.n = int(data.size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.samples, x, side="right") / self.n

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.samples, q))

    def sup_distance(self, reference_cdf) -> float:
        ref = np.asarray(reference_cdf(self.samples), dtype=float)
        grid = np.arange(1, self.n + 1) / self.n
        upper = np.max(grid - ref)
        lower = np.max(ref - (grid - 1.0 / self.n))
        return float(max(upper, lower))

    def histogram(self, bins=50, range=None, density=True):
        counts, edges = np.histogram(self.samples, bins=bins, range=range, density=density)
        return counts, edges
