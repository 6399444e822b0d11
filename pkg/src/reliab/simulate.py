"""Seeded Monte Carlo harness for empirical Type I error estimation.

Null-true experiments: both groups draw i.i.d. from the same
distribution, every rejection is a false positive, and the per-tail
rejection rates are compared against alpha/2.

Reproducibility contract: every replication derives its own RNG stream
from (seed, total sample size, replication index, redraw attempt), so
reports are bit-identical for a fixed seed no matter how replications
are scheduled or how many workers run them. Degenerate draws (zero
variance in either group, possible when resampling small discrete
datasets) are redrawn on the next attempt stream and counted.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import edgeworth, inference, planning
from .errors import (ConfigurationError, DataError, DegenerateSampleError)
from .inference import DesignContext
from .moments import MomentAccumulator
from .planning import PopulationCumulants

CLASSIC = "classic"
CORRECTED = "corrected"
METHODS = (CLASSIC, CORRECTED)

_MAX_ATTEMPTS = 1000
_CHUNK_SIZE = 512  # fixed decomposition => results independent of worker count


@dataclass(frozen=True)
class DistributionSpec:
    """Sampling distribution for one simulated experiment arm.

    Families: normal(mu, sigma), lognormal(mu, sigma),
    gamma(shape, scale), and empirical (i.i.d. resampling with
    replacement from a fixed dataset).
    """

    family: str
    params: tuple[float, ...] = ()
    values: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def normal(cls, mu: float, sigma: float) -> "DistributionSpec":
        if not (sigma > 0):
            raise ConfigurationError(f"normal sigma must be > 0, got {sigma}")
        return cls("normal", (float(mu), float(sigma)))

    @classmethod
    def lognormal(cls, mu: float, sigma: float) -> "DistributionSpec":
        if not (sigma > 0):
            raise ConfigurationError(f"lognormal sigma must be > 0, got {sigma}")
        return cls("lognormal", (float(mu), float(sigma)))

    @classmethod
    def gamma(cls, shape: float, scale: float) -> "DistributionSpec":
        if not (shape > 0 and scale > 0):
            raise ConfigurationError(
                f"gamma shape and scale must be > 0, got ({shape}, {scale})")
        return cls("gamma", (float(shape), float(scale)))

    @classmethod
    def empirical(cls, values: Sequence[float]) -> "DistributionSpec":
        arr = np.asarray(values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ConfigurationError("empirical dataset is empty")
        if not np.isfinite(arr).all():
            raise DataError("empirical dataset contains non-finite values")
        return cls("empirical", (), arr)

    @classmethod
    def parse(cls, text: str) -> "DistributionSpec":
        """Parse 'family:p1,p2' strings, e.g. 'lognormal:0,1'."""
        name, _, rest = text.partition(":")
        name = name.strip().lower()
        try:
            params = tuple(float(tok) for tok in rest.split(",")) if rest else ()
        except ValueError as exc:
            raise ConfigurationError(f"bad distribution parameters in {text!r}") from exc
        makers = {"normal": cls.normal, "lognormal": cls.lognormal,
                  "gamma": cls.gamma}
        if name not in makers:
            raise ConfigurationError(
                f"unknown distribution family {name!r}; expected one of "
                f"{sorted(makers)} or an empirical dataset")
        if len(params) != 2:
            raise ConfigurationError(
                f"{name} takes exactly 2 parameters, got {len(params)}")
        return makers[name](*params)

    def describe(self) -> str:
        if self.family == "empirical":
            return f"empirical(n={self.values.size})"
        return f"{self.family}({', '.join(repr(p) for p in self.params)})"

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. values."""
        if n < 1:
            raise ConfigurationError(f"sample size must be >= 1, got {n}")
        if self.family == "normal":
            return rng.normal(self.params[0], self.params[1], size=n)
        if self.family == "lognormal":
            return rng.lognormal(self.params[0], self.params[1], size=n)
        if self.family == "gamma":
            return rng.gamma(self.params[0], self.params[1], size=n)
        idx = rng.integers(0, self.values.size, size=n)
        return self.values[idx]

    def population_cumulants(self) -> PopulationCumulants:
        """Exact cumulants of the sampled population.

        For the empirical family the population is the discrete uniform
        distribution over the dataset, so its n-divisor sample moments
        are the exact population moments.
        """
        if self.family == "normal":
            mu, sigma = self.params
            return PopulationCumulants(mu, sigma * sigma, 0.0, 3.0)
        if self.family == "lognormal":
            return planning.lognormal_population_cumulants(*self.params)
        if self.family == "gamma":
            shape, scale = self.params
            return PopulationCumulants(shape * scale, shape * scale * scale,
                                       2.0 / math.sqrt(shape), 3.0 + 6.0 / shape)
        summary = MomentAccumulator.from_values(self.values).finalize()
        return PopulationCumulants(summary.mean, summary.variance,
                                   summary.skewness, summary.kurtosis)


@dataclass(frozen=True)
class SimulationConfig:
    """Protocol parameters for one tail-error study."""

    alpha: float = 0.05
    epsilon: float = 0.01
    k: float = 1.0
    b: int = 10_000
    seed: int = 0
    n_values: tuple[int, ...] = ()
    methods: tuple[str, ...] = METHODS

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (self.epsilon > 0.0):
            raise ConfigurationError(f"epsilon must be > 0, got {self.epsilon}")
        if not (self.k > 0.0):
            raise ConfigurationError(f"k must be > 0, got {self.k}")
        if self.b < 100:
            raise ConfigurationError(f"need at least 100 replications, got {self.b}")
        if not self.n_values:
            raise ConfigurationError("no total sample sizes given")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigurationError(
                f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        for n in self.n_values:
            split_sizes(n, self.k)  # raises if a split is infeasible
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "methods", tuple(self.methods))


def split_sizes(n_total: int, k: float) -> tuple[int, int]:
    """Split total N into (n_x, n_y) with n_y/n_x as close to k as possible."""
    if n_total < 2.0 * (1.0 + k):
        raise ConfigurationError(
            f"N={n_total} is too small for ratio k={k}; need N >= {2 * (1 + k):.0f}")
    n_x = round(n_total / (1.0 + k))
    n_y = int(n_total) - n_x
    if n_x < 2 or n_y < 2:
        raise ConfigurationError(
            f"N={n_total} with k={k} leaves a group below 2 observations")
    return n_x, n_y


def replication_stream(seed: int, n_total: int, replication: int,
                       attempt: int = 0) -> np.random.Generator:
    """Independent RNG stream keyed by (seed, N, replication, attempt)."""
    entropy = (int(seed) & 0xFFFFFFFFFFFFFFFF, int(n_total),
               int(replication), int(attempt))
    return np.random.default_rng(np.random.SeedSequence(entropy))


class ReplicationResult(NamedTuple):
    statistic: float
    p_classic: float
    p_corrected: float


def sample_group(spec: DistributionSpec, n: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Draw one group's observations from the spec."""
    return spec.sample(n, rng)


def run_replication(spec: DistributionSpec, n_x: int, n_y: int,
                    rng: np.random.Generator) -> ReplicationResult:
    """One null-true experiment: draw both groups, test both ways.

    Raises DegenerateSampleError when either drawn group has zero
    variance; the engine redraws such replications on a fresh stream.
    """
    x = MomentAccumulator.from_values(sample_group(spec, n_x, rng)).finalize()
    y = MomentAccumulator.from_values(sample_group(spec, n_y, rng)).finalize()
    design = DesignContext.from_sizes(n_x, n_y)
    t = inference.welch_statistic(x, y)
    p_t = inference.p_value_classic(t)
    p_c = edgeworth.p_value_corrected(t, x, y, design)
    return ReplicationResult(t, p_t, p_c)


def _replicate_with_redraw(spec: DistributionSpec, n_x: int, n_y: int,
                           seed: int, n_total: int,
                           replication: int) -> tuple[ReplicationResult, int]:
    for attempt in range(_MAX_ATTEMPTS):
        rng = replication_stream(seed, n_total, replication, attempt)
        try:
            return run_replication(spec, n_x, n_y, rng), attempt
        except DegenerateSampleError:
            continue
    raise DegenerateSampleError(
        f"replication {replication} drew {_MAX_ATTEMPTS} degenerate samples; "
        "the dataset is effectively constant")


class _ChunkTally(NamedTuple):
    classic_left: int
    classic_right: int
    corrected_left: int
    corrected_right: int
    disagreements: int
    redraws: int
    statistics: np.ndarray | None


def _run_chunk(spec: DistributionSpec, n_x: int, n_y: int, seed: int,
               n_total: int, alpha: float, rep_lo: int, rep_hi: int,
               collect_t: bool) -> _ChunkTally:
    cl = cr = el = er = dis = redraws = 0
    t_vals = np.empty(rep_hi - rep_lo) if collect_t else None
    for rep in range(rep_lo, rep_hi):
        result, attempt = _replicate_with_redraw(spec, n_x, n_y, seed,
                                                 n_total, rep)
        redraws += attempt
        t, p_t, p_c = result
        rej_t = p_t < alpha
        rej_c = p_c < alpha
        if rej_t and t < 0.0:
            cl += 1
        elif rej_t and t > 0.0:
            cr += 1
        if rej_c and t < 0.0:
            el += 1
        elif rej_c and t > 0.0:
            er += 1
        if rej_t != rej_c:
            dis += 1
        if collect_t:
            t_vals[rep - rep_lo] = t
    return _ChunkTally(cl, cr, el, er, dis, redraws, t_vals)


@dataclass(frozen=True)
class TailErrorRow:
    """Empirical tail rates for one (method, N) cell."""

    method: str
    n_total: int
    n_x: int
    n_y: int
    alpha_hat_left: float
    alpha_hat_right: float
    se_left: float
    se_right: float
    dev_left: float
    dev_right: float
    total_dev: float
    passed: bool
    redraws: int


@dataclass(frozen=True)
class TailErrorReport:
    """Full tail-error table plus the config needed to replay it."""

    alpha: float
    epsilon: float
    k: float
    b: int
    seed: int
    methods: tuple[str, ...]
    spec_label: str
    rows: tuple[TailErrorRow, ...]
    disagreements: dict[int, int]
    t_values: dict[int, np.ndarray] | None = None

    def row(self, method: str, n_total: int) -> TailErrorRow:
        for r in self.rows:
            if r.method == method and r.n_total == n_total:
                return r
        raise KeyError(f"no row for method={method!r}, N={n_total}")


def _binomial_se(p_hat: float, b: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / b)


def estimate_tail_errors(config: SimulationConfig, spec: DistributionSpec,
                         n_jobs: int = 1,
                         collect_t: bool = False) -> TailErrorReport:
    """Run the replication study over the configured N grid."""
    if spec.family == "empirical" and float(np.var(spec.values)) <= 0.0:
        raise DegenerateSampleError(
            "empirical dataset has zero variance; tests are undefined")
    if n_jobs < 1:
        raise ConfigurationError(f"n_jobs must be >= 1, got {n_jobs}")
    rows: list[TailErrorRow] = []
    disagreements: dict[int, int] = {}
    t_values: dict[int, np.ndarray] = {}
    for n_total in config.n_values:
        n_x, n_y = split_sizes(n_total, config.k)
        spans = [(lo, min(lo + _CHUNK_SIZE, config.b))
                 for lo in range(0, config.b, _CHUNK_SIZE)]
        args = [(spec, n_x, n_y, config.seed, n_total, config.alpha,
                 lo, hi, collect_t) for lo, hi in spans]
        if n_jobs == 1:
            tallies = [_run_chunk(*a) for a in args]
        else:
            with ProcessPoolExecutor(max_workers=n_jobs) as pool:
                tallies = list(pool.map(_run_chunk, *zip(*args)))
        cl = sum(t.classic_left for t in tallies)
        cr = sum(t.classic_right for t in tallies)
        el = sum(t.corrected_left for t in tallies)
        er = sum(t.corrected_right for t in tallies)
        disagreements[n_total] = sum(t.disagreements for t in tallies)
        redraws = sum(t.redraws for t in tallies)
        if collect_t:
            t_values[n_total] = np.concatenate([t.statistics for t in tallies])
        counts = {CLASSIC: (cl, cr), CORRECTED: (el, er)}
        for method in config.methods:
            left, right = counts[method]
            a_l = left / config.b
            a_r = right / config.b
            dev_l = a_l - config.alpha / 2.0
            dev_r = a_r - config.alpha / 2.0
            rows.append(TailErrorRow(
                method=method, n_total=n_total, n_x=n_x, n_y=n_y,
                alpha_hat_left=a_l, alpha_hat_right=a_r,
                se_left=_binomial_se(a_l, config.b),
                se_right=_binomial_se(a_r, config.b),
                dev_left=dev_l, dev_right=dev_r,
                total_dev=abs(a_l + a_r - config.alpha),
                passed=max(abs(dev_l), abs(dev_r)) <= config.epsilon,
                redraws=redraws))
    return TailErrorReport(
        alpha=config.alpha, epsilon=config.epsilon, k=config.k, b=config.b,
        seed=config.seed, methods=config.methods, spec_label=spec.describe(),
        rows=tuple(rows), disagreements=disagreements,
        t_values=t_values if collect_t else None)


def collect_statistics(config: SimulationConfig, spec: DistributionSpec,
                       n_total: int, n_jobs: int = 1) -> np.ndarray:
    """All B Welch statistics at one N, in replication order."""
    single = SimulationConfig(alpha=config.alpha, epsilon=config.epsilon,
                              k=config.k, b=config.b, seed=config.seed,
                              n_values=(n_total,), methods=config.methods)
    report = estimate_tail_errors(single, spec, n_jobs=n_jobs, collect_t=True)
    return report.t_values[n_total]


def auto_grid(n_center: int, k: float | None = None) -> list[int]:
    """Seven N values geometrically spaced over [n_center/5, 5*n_center].

    Endpoints inclusive before rounding; each value is rounded to the
    nearest integer admitting the (optional) split and duplicates are
    bumped upward so the grid is strictly increasing.
    """
    if n_center < 10:
        raise ConfigurationError(f"grid center must be >= 10, got {n_center}")
    lo = n_center / 5.0
    ratio = 25.0 ** (1.0 / 6.0)
    floor_n = 2 if k is None else math.ceil(2.0 * (1.0 + k))
    grid: list[int] = []
    for i in range(7):
        n = round(lo * ratio ** i)
        n = max(n, floor_n)
        if k is not None:
            while True:
                try:
                    split_sizes(n, k)
                    break
                except ConfigurationError:
                    n += 1
        if grid and n <= grid[-1]:
            n = grid[-1] + 1
            if k is not None:
                while True:
                    try:
                        split_sizes(n, k)
                        break
                    except ConfigurationError:
                        n += 1
        grid.append(n)
    return grid


def find_min_passing(report: TailErrorReport, method: str) -> int | None:
    """Smallest grid N whose max per-tail deviation is within epsilon."""
    passing = sorted(r.n_total for r in report.rows
                     if r.method == method and r.passed)
    return passing[0] if passing else None


def sweep_min_n(config: SimulationConfig, spec: DistributionSpec,
                method: str = CLASSIC, n_jobs: int = 1) -> int | None:
    """Run the grid and report the smallest passing N (None if none pass)."""
    if method not in config.methods:
        raise ConfigurationError(
            f"method {method!r} is not among configured methods {config.methods}")
    report = estimate_tail_errors(config, spec, n_jobs=n_jobs)
    return find_min_passing(report, method)
