"""Welch two-sample statistic, normal-reference p-value, decision rule.

The p-value is deliberately the normal approximation 2*(1 - Phi(|T|)),
not a Student-t with Welch-Satterthwaite degrees of freedom: the whole
deviation analysis and its corrections are built on the normal
reference, and the tail-error tables only reproduce under it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import stdnorm
from .errors import ConfigurationError, DegenerateSampleError
from .moments import GroupSummary


@dataclass(frozen=True)
class DesignContext:
    """Allocation design: group sizes with their ratio k = n_y/n_x."""

    n_x: float
    n_y: float

    def __post_init__(self) -> None:
        if not (self.n_x > 0 and self.n_y > 0):
            raise ConfigurationError(
                f"group sizes must be positive, got ({self.n_x}, {self.n_y})")

    @classmethod
    def from_sizes(cls, n_x: int, n_y: int) -> "DesignContext":
        if n_x < 2 or n_y < 2:
            raise ConfigurationError(
                f"each group needs at least 2 observations, got ({n_x}, {n_y})")
        return cls(n_x=float(n_x), n_y=float(n_y))

    @classmethod
    def from_ratio(cls, k: float, total: float) -> "DesignContext":
        """Hypothetical design with treatment/control ratio k and total N."""
        if not (k > 0) or not math.isfinite(k):
            raise ConfigurationError(f"allocation ratio k must be > 0, got {k}")
        if not (total > 0):
            raise ConfigurationError(f"total sample size must be > 0, got {total}")
        n_x = total / (1.0 + k)
        return cls(n_x=n_x, n_y=total - n_x)

    @property
    def k(self) -> float:
        return self.n_y / self.n_x

    @property
    def total(self) -> float:
        return self.n_x + self.n_y


class Decision(str, enum.Enum):
    REJECT_RIGHT = "reject-right"
    REJECT_LEFT = "reject-left"
    FAIL_TO_REJECT = "fail-to-reject"


@dataclass(frozen=True)
class TestResult:
    """Outcome of a two-sample comparison under one or both p-values."""

    statistic: float
    p_classic: float
    alpha: float
    decision_classic: Decision
    p_corrected: float | None = None
    decision_corrected: Decision | None = None


def welch_statistic(x: GroupSummary, y: GroupSummary) -> float:
    """T = (mean_y - mean_x) / sqrt(var_x/n_x + var_y/n_y)."""
    if x.variance <= 0.0 or y.variance <= 0.0:
        raise DegenerateSampleError("group variance must be positive")
    se2 = x.variance / x.n + y.variance / y.n
    if se2 <= 0.0:
        raise DegenerateSampleError("pooled standard error is zero")
    return (y.mean - x.mean) / math.sqrt(se2)


def p_value_classic(t: float) -> float:
    """Two-sided normal-approximation p-value 2*(1 - Phi(|T|))."""
    # identical to erfc(|T|/sqrt(2)), which keeps precision in the far tail
    return math.erfc(abs(t) / math.sqrt(2.0))


def decide(p: float, alpha: float, t: float) -> Decision:
    """Reject iff p < alpha strictly; direction follows the sign of T."""
    if not (0.0 < alpha < 1.0):
        raise ConfigurationError(f"alpha must be in (0, 1), got {alpha}")
    if p < alpha and t > 0.0:
        return Decision.REJECT_RIGHT
    if p < alpha and t < 0.0:
        return Decision.REJECT_LEFT
    return Decision.FAIL_TO_REJECT
