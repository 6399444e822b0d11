"""Minimum sample sizes and predicted per-tail Type I error deviations.

With z = quantile(alpha/2) (the negative lower quantile) the two
planning coefficients are

    a1 = (1/6)(2z^2+1) phi(z) sqrt((1+k)/k)
         * (g_y s_y^3 - k^2 g_x s_x^3) / (k s_x^2 + s_y^2)^(3/2)

    a2 = phi(z) * [ (1+k)/(12k) * ((t_y-3)s_y^4 + k^3(t_x-3)s_x^4)
                                  / (s_y^2+k s_x^2)^2 * (z^3-3z)
                  - (1+k)/(18k) * (g_y s_y^3 - k^2 g_x s_x^3)^2
                                  / (k s_x^2+s_y^2)^3 * (z^5+2z^3-3z)
                  - (1+k)/4 * ((k^3 s_x^4+s_y^4)(z^3+3z)
                               + 2k(1+k) s_x^2 s_y^2 z)
                              / (k (k s_x^2+s_y^2)^2) ]

a1 contains only even powers of z, so the quantile's sign is
immaterial there; a2 has odd powers and is pinned to the *lower*
quantile z < 0 — using the upper quantile flips its sign.

The per-tail deviation predictions are a1/sqrt(N) with opposite signs
per tail, optionally refined by a common a2/N term, and the thresholds
are

    N1 = ceil((a1/eps)^2)                                  (a1 != 0)
    N2 = ceil(((|a1| + sqrt(a1^2 - 4|a2| eps s)) / (2 eps))^2),
         s = sign(a1^2 - 4|a2| eps), sign(0) = +1
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from . import stdnorm
from .errors import ConfigurationError, DomainError
from .moments import GroupCumulants


@dataclass(frozen=True)
class PlanningInputs:
    """Nominal level, tail tolerance, allocation ratio, group shapes."""

    alpha: float
    epsilon: float
    k: float
    x: GroupCumulants
    y: GroupCumulants

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (self.epsilon > 0.0):
            raise ConfigurationError(f"epsilon must be > 0, got {self.epsilon}")
        if not (self.k > 0.0):
            raise ConfigurationError(f"allocation ratio k must be > 0, got {self.k}")
        for label, cum in (("x", self.x), ("y", self.y)):
            if not (cum.variance > 0.0):
                raise ConfigurationError(
                    f"group {label} variance must be > 0, got {cum.variance}")
            if cum.kurtosis < cum.skewness ** 2 + 1.0:
                raise ConfigurationError(
                    f"group {label} cumulants violate kurtosis >= skewness^2 + 1 "
                    f"(got skewness={cum.skewness}, kurtosis={cum.kurtosis})")
        if self.epsilon >= self.alpha / 2.0:
            warnings.warn(
                f"epsilon={self.epsilon} is at least alpha/2={self.alpha / 2.0}; "
                "the per-tail tolerance exceeds the per-tail budget and any N "
                "trivially satisfies it", stacklevel=2)


def coefficient_a1(inputs: PlanningInputs) -> float:
    """Leading (skewness-driven) deviation coefficient."""
    z = stdnorm.quantile(inputs.alpha / 2.0)
    k = inputs.k
    sx2, sy2 = inputs.x.variance, inputs.y.variance
    sx3 = sx2 * math.sqrt(sx2)
    sy3 = sy2 * math.sqrt(sy2)
    pooled = k * sx2 + sy2
    return ((2.0 * z * z + 1.0) / 6.0 * stdnorm.pdf(z)
            * math.sqrt((1.0 + k) / k)
            * (inputs.y.skewness * sy3 - k * k * inputs.x.skewness * sx3)
            / (pooled * math.sqrt(pooled)))


def coefficient_a2(inputs: PlanningInputs) -> float:
    """Second-order deviation coefficient, evaluated at the lower quantile."""
    z = stdnorm.quantile(inputs.alpha / 2.0)
    k = inputs.k
    sx2, sy2 = inputs.x.variance, inputs.y.variance
    sx3 = sx2 * math.sqrt(sx2)
    sy3 = sy2 * math.sqrt(sy2)
    pooled = k * sx2 + sy2
    z3 = z * z * z
    z5 = z3 * z * z
    kurt_term = ((1.0 + k) / (12.0 * k)
                 * ((inputs.y.kurtosis - 3.0) * sy2 * sy2
                    + k ** 3 * (inputs.x.kurtosis - 3.0) * sx2 * sx2)
                 / (pooled * pooled) * (z3 - 3.0 * z))
    skew_term = ((1.0 + k) / (18.0 * k)
                 * (inputs.y.skewness * sy3 - k * k * inputs.x.skewness * sx3) ** 2
                 / pooled ** 3 * (z5 + 2.0 * z3 - 3.0 * z))
    var_term = ((1.0 + k) / 4.0
                * ((k ** 3 * sx2 * sx2 + sy2 * sy2) * (z3 + 3.0 * z)
                   + 2.0 * k * (1.0 + k) * sx2 * sy2 * z)
                / (k * pooled * pooled))
    return stdnorm.pdf(z) * (kurt_term - skew_term - var_term)


def n_min_first(a1: float, epsilon: float) -> int | None:
    """First-order threshold ceil((a1/eps)^2); None when a1 == 0."""
    if not (epsilon > 0.0):
        raise ConfigurationError(f"epsilon must be > 0, got {epsilon}")
    if a1 == 0.0:
        return None
    return math.ceil((a1 / epsilon) ** 2)


def n_min_second(a1: float, a2: float, epsilon: float) -> int:
    """Second-order threshold; degenerates to n_min_first when a2 == 0."""
    if not (epsilon > 0.0):
        raise ConfigurationError(f"epsilon must be > 0, got {epsilon}")
    disc = a1 * a1 - 4.0 * abs(a2) * epsilon
    sign = 1.0 if disc >= 0.0 else -1.0
    inner = a1 * a1 - 4.0 * abs(a2) * epsilon * sign
    root = (abs(a1) + math.sqrt(inner)) / (2.0 * epsilon)
    return math.ceil(root * root)


def predicted_tail_deviation(n_total: float, inputs: PlanningInputs,
                             order: int = 2) -> tuple[float, float]:
    """Predicted (left, right) tail deviations from alpha/2 at total size N.

    order=1 gives (+a1, -a1)/sqrt(N); order=2 adds the common a2/N term
    to both tails.
    """
    if not (n_total >= 4):
        raise ConfigurationError(f"total sample size must be >= 4, got {n_total}")
    if order not in (1, 2):
        raise ConfigurationError(f"order must be 1 or 2, got {order}")
    a1 = coefficient_a1(inputs)
    first = a1 / math.sqrt(n_total)
    second = coefficient_a2(inputs) / n_total if order == 2 else 0.0
    return first + second, -first + second


@dataclass(frozen=True)
class SampleSizePlan:
    """Planning coefficients, both thresholds, optional deviation query."""

    a1: float
    a2: float
    n_min_first: int | None
    n_min_second: int
    queried_n: float | None = None
    predicted_dev_left: float | None = None
    predicted_dev_right: float | None = None


def plan(inputs: PlanningInputs, queried_n: float | None = None) -> SampleSizePlan:
    """Evaluate both thresholds, optionally predicting tails at one N."""
    a1 = coefficient_a1(inputs)
    a2 = coefficient_a2(inputs)
    dev_l = dev_r = None
    if queried_n is not None:
        dev_l, dev_r = predicted_tail_deviation(queried_n, inputs)
    return SampleSizePlan(a1=a1, a2=a2,
                          n_min_first=n_min_first(a1, inputs.epsilon),
                          n_min_second=n_min_second(a1, a2, inputs.epsilon),
                          queried_n=queried_n,
                          predicted_dev_left=dev_l,
                          predicted_dev_right=dev_r)


class PopulationCumulants(NamedTuple):
    """Closed-form population mean, variance, skewness, kurtosis."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def as_group(self) -> GroupCumulants:
        return GroupCumulants(variance=self.variance, skewness=self.skewness,
                              kurtosis=self.kurtosis)


def lognormal_population_cumulants(mu: float, sigma: float) -> PopulationCumulants:
    """Moments of exp(Z), Z ~ N(mu, sigma^2)."""
    if not (sigma > 0.0) or not math.isfinite(sigma):
        raise DomainError(f"lognormal sigma must be > 0, got {sigma}")
    w = math.exp(sigma * sigma)
    mean = math.exp(mu + sigma * sigma / 2.0)
    variance = (w - 1.0) * math.exp(2.0 * mu + sigma * sigma)
    skewness = (w + 2.0) * math.sqrt(w - 1.0)
    kurtosis = w ** 4 + 2.0 * w ** 3 + 3.0 * w * w - 3.0
    return PopulationCumulants(mean, variance, skewness, kurtosis)
