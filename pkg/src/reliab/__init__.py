"""reliab: trustworthy two-sample A/B testing for skewed, long-tailed data.

The package answers three questions about a two-sample experiment with
possibly unequal allocation:

  * test   -- Welch statistic with the classic normal-reference p-value
              and a second-order corrected p-value that stays calibrated
              when the data are skewed (`inference`, `edgeworth`);
  * plan   -- how large the experiment must be for per-tail Type I
              error to stay within a tolerance (`planning`);
  * verify -- a seeded Monte Carlo harness measuring actual per-tail
              error rates for any of it (`simulate`).
"""

__version__ = "0.1.0"

from .edgeworth import (DifferenceCumulants, difference_cumulants,
                        p_value_corrected, two_sample_test)
from .errors import (ConfigurationError, DataError, DegenerateSampleError,
                     DomainError, IngestionError, InsufficientDataError,
                     NumericError, ReliabError)
from .inference import (Decision, DesignContext, TestResult, decide,
                        p_value_classic, welch_statistic)
from .moments import GroupCumulants, GroupSummary, MomentAccumulator, summarize
from .planning import (PlanningInputs, PopulationCumulants, SampleSizePlan,
                       coefficient_a1, coefficient_a2,
                       lognormal_population_cumulants, n_min_first,
                       n_min_second, plan, predicted_tail_deviation)
from .simulate import (DistributionSpec, SimulationConfig, TailErrorReport,
                       TailErrorRow, auto_grid, collect_statistics,
                       estimate_tail_errors, find_min_passing, run_replication,
                       sample_group, split_sizes, sweep_min_n)

__all__ = [
    "__version__",
    "ConfigurationError", "DataError", "DegenerateSampleError", "DomainError",
    "IngestionError", "InsufficientDataError", "NumericError", "ReliabError",
    "Decision", "DesignContext", "TestResult", "decide", "p_value_classic",
    "welch_statistic",
    "GroupCumulants", "GroupSummary", "MomentAccumulator", "summarize",
    "DifferenceCumulants", "difference_cumulants", "p_value_corrected",
    "two_sample_test",
    "PlanningInputs", "PopulationCumulants", "SampleSizePlan",
    "coefficient_a1", "coefficient_a2", "lognormal_population_cumulants",
    "n_min_first", "n_min_second", "plan", "predicted_tail_deviation",
    "DistributionSpec", "SimulationConfig", "TailErrorReport", "TailErrorRow",
    "auto_grid", "collect_statistics", "estimate_tail_errors",
    "find_min_passing", "run_replication", "sample_group", "split_sizes",
    "sweep_min_n",
]
