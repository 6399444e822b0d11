"""One-pass, mergeable moment estimation per experiment group.

The accumulator keeps the count, the running mean, and centered power
sums M2..M4 (Welford/Pebay recurrences), so data can stream in any
order, be reduced in parallel, and still finalize to the same summary.
All estimators divide by n, not n-1, and skewness/kurtosis carry no
small-sample bias correction:

    variance = M2/n
    skewness = M3 / (n * variance^1.5)
    kurtosis = M4 / (n * variance^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DataError, DegenerateSampleError, InsufficientDataError


@dataclass(frozen=True)
class GroupSummary:
    """Per-group n, mean, variance (n divisor), skewness, kurtosis."""

    n: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float


@dataclass(frozen=True)
class GroupCumulants:
    """Shape of a group without data: variance, skewness, kurtosis.

    Planning-mode stand-in for a GroupSummary; any object with these
    three attributes works where downstream formulas only need shape.
    """

    variance: float
    skewness: float
    kurtosis: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


class MomentAccumulator:
    """Streaming accumulator of count, mean, and central sums M2..M4."""

    __slots__ = ("n", "mean", "m2", "m3", "m4")

    def __init__(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.m3 = 0.0
        self.m4 = 0.0

    def __repr__(self) -> str:
        return (f"MomentAccumulator(n={self.n}, mean={self.mean!r}, "
                f"m2={self.m2!r}, m3={self.m3!r}, m4={self.m4!r})")

    def add(self, x: float) -> "MomentAccumulator":
        """Fold one observation into the running sums."""
        x = float(x)
        if not math.isfinite(x):
            raise DataError(f"observations must be finite, got {x!r}")
        n1 = self.n
        self.n = n = n1 + 1
        delta = x - self.mean
        delta_n = delta / n
        delta_n2 = delta_n * delta_n
        term1 = delta * delta_n * n1
        self.mean += delta_n
        self.m4 += (term1 * delta_n2 * (n * n - 3 * n + 3)
                    + 6.0 * delta_n2 * self.m2 - 4.0 * delta_n * self.m3)
        self.m3 += term1 * delta_n * (n - 2) - 3.0 * delta_n * self.m2
        self.m2 += term1
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Combine two accumulators into a new one, order-insensitive."""
        if self.n == 0:
            return other.copy()
        if other.n == 0:
            return self.copy()
        a, b = self, other
        na, nb = a.n, b.n
        n = na + nb
        delta = b.mean - a.mean
        delta2 = delta * delta
        out = MomentAccumulator()
        out.n = n
        out.mean = a.mean + delta * nb / n
        out.m2 = a.m2 + b.m2 + delta2 * na * nb / n
        out.m3 = (a.m3 + b.m3
                  + delta2 * delta * na * nb * (na - nb) / (n * n)
                  + 3.0 * delta * (na * b.m2 - nb * a.m2) / n)
        out.m4 = (a.m4 + b.m4
                  + delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (n ** 3)
                  + 6.0 * delta2 * (na * na * b.m2 + nb * nb * a.m2) / (n * n)
                  + 4.0 * delta * (na * b.m3 - nb * a.m3) / n)
        return out

    def copy(self) -> "MomentAccumulator":
        out = MomentAccumulator()
        out.n, out.mean = self.n, self.mean
        out.m2, out.m3, out.m4 = self.m2, self.m3, self.m4
        return out

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "MomentAccumulator":
        """Build an accumulator from a batch in two stable passes."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            arr = arr.ravel()
        if arr.size and not np.isfinite(arr).all():
            raise DataError("observations must be finite")
        out = cls()
        out.n = int(arr.size)
        if out.n == 0:
            return out
        mean = float(arr.mean())
        d = arr - mean
        # fold the residual mean of d back in so m2..m4 are exactly centered
        mean += float(d.mean())
        d = arr - mean
        d2 = d * d
        out.mean = mean
        out.m2 = float(d2.sum())
        out.m3 = float((d2 * d).sum())
        out.m4 = float((d2 * d2).sum())
        return out

    def finalize(self) -> GroupSummary:
        """Close out the sums into a GroupSummary."""
        if self.n < 2:
            raise InsufficientDataError(
                f"need at least 2 observations, have {self.n}")
        variance = self.m2 / self.n
        if variance <= 0.0:
            raise DegenerateSampleError(
                "all observations are identical; variance is zero")
        if variance < 1e-150:
            # variance^2 underflows; standardized moments are not
            # representable -- rescale the data instead
            raise DegenerateSampleError(
                f"variance {variance!r} is too small to standardize")
        sd3 = variance * math.sqrt(variance)
        skewness = self.m3 / (self.n * sd3)
        kurtosis = self.m4 / (self.n * variance * variance)
        return GroupSummary(n=self.n, mean=self.mean, variance=variance,
                            skewness=skewness, kurtosis=kurtosis)


def summarize(values: Iterable[float]) -> GroupSummary:
    """One-shot batch summary of a sequence of observations."""
    return MomentAccumulator.from_values(values).finalize()
