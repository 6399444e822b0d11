"""Command-line surface: data ingestion, planning, testing, simulation.

Subcommands
    analyze   two-sample test on CSV data (classic + corrected p-values)
    plan      minimum sample sizes and predicted tail deviations
    simulate  seeded Monte Carlo tail-error table over an N grid
    sweep     empirical minimal N vs the theoretical thresholds

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 internal numeric error. Warnings go to stderr so piped CSV/JSON
stays clean.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__, edgeworth, inference, planning, simulate
from .errors import (ConfigurationError, DataError, DomainError,
                     IngestionError, InsufficientDataError, NumericError,
                     ReliabError)
from .inference import DesignContext
from .moments import GroupCumulants, GroupSummary, summarize
from .report import Report
from .simulate import DistributionSpec, SimulationConfig

SEED_ENV_VAR = "RELIAB_SEED"


@dataclass(frozen=True)
class IngestedDataset:
    """Finite numeric observations parsed from one CSV source."""

    values: np.ndarray
    source: str

    @property
    def count(self) -> int:
        return int(self.values.size)


def _parse_number(token: str, path: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise IngestionError(
            f"{path}:{lineno}: not a number: {token!r}") from None
    if not math.isfinite(value):
        raise IngestionError(f"{path}:{lineno}: non-finite value: {token!r}")
    return value


def _read_rows(path: str) -> list[tuple[int, list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = [(lineno, row) for lineno, row
                    in enumerate(csv.reader(handle), start=1)
                    if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise IngestionError(f"{path}: empty after parsing")
    return rows


def _looks_like_header(row: list[str]) -> bool:
    try:
        float(row[-1])
    except ValueError:
        return True
    return False


def ingest(path: str) -> IngestedDataset:
    """Parse a one-value-per-line CSV, with an optional header row."""
    rows = _read_rows(path)
    if len(rows[0][1]) != 1:
        raise IngestionError(
            f"{path}:1: expected a single column, got {len(rows[0][1])} "
            "(use a combined group,value file with a single path argument)")
    if _looks_like_header(rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise IngestionError(f"{path}: no data rows after the header")
    values = [_parse_number(row[0].strip(), path, lineno)
              for lineno, row in rows]
    if len(values) < 2:
        raise InsufficientDataError(
            f"{path}: need at least 2 observations, got {len(values)}")
    return IngestedDataset(values=np.asarray(values), source=path)


def ingest_pair(path: str) -> tuple[IngestedDataset, IngestedDataset]:
    """Parse a two-column group,value CSV into (control, treatment)."""
    rows = _read_rows(path)
    if len(rows[0][1]) != 2:
        raise IngestionError(
            f"{path}:1: expected two columns group,value, got {len(rows[0][1])}")
    if _looks_like_header(rows[0][1]):
        rows = rows[1:]
    groups: dict[str, list[float]] = {}
    for lineno, row in rows:
        if len(row) != 2:
            raise IngestionError(
                f"{path}:{lineno}: expected two columns, got {len(row)}")
        label = row[0].strip()
        groups.setdefault(label, []).append(
            _parse_number(row[1].strip(), path, lineno))
    if len(groups) != 2:
        raise IngestionError(
            f"{path}: expected exactly 2 group labels, got {sorted(groups)}")
    lowered = {label.lower(): label for label in groups}
    if {"control", "treatment"} <= set(lowered):
        control, treatment = lowered["control"], lowered["treatment"]
    else:
        control, treatment = sorted(groups)
        print(f"warning: group labels {sorted(groups)} are not "
              f"control/treatment; using {control!r} as control",
              file=sys.stderr)
    out = []
    for label in (control, treatment):
        values = groups[label]
        if len(values) < 2:
            raise InsufficientDataError(
                f"{path}: group {label!r} needs at least 2 observations")
        out.append(IngestedDataset(values=np.asarray(values),
                                   source=f"{path}#{label}"))
    return out[0], out[1]


def _summary_scalars(prefix: str, s: GroupSummary) -> dict:
    return {f"{prefix}_n": s.n, f"{prefix}_mean": s.mean,
            f"{prefix}_variance": s.variance, f"{prefix}_skewness": s.skewness,
            f"{prefix}_kurtosis": s.kurtosis}


def cmd_analyze(args: argparse.Namespace) -> Report:
    if args.treatment is None:
        control, treatment = ingest_pair(args.control)
    else:
        control = ingest(args.control)
        treatment = ingest(args.treatment)
    x = summarize(control.values)
    y = summarize(treatment.values)
    design = DesignContext.from_sizes(x.n, y.n)
    t = inference.welch_statistic(x, y)
    p_t = inference.p_value_classic(t)
    cum = edgeworth.difference_cumulants(x, y, design)
    g_tr = edgeworth.g_hat_truncated(t, cum, x.variance, y.variance, design)
    p_c = 0.0 if t == 0.0 else 2.0 * min(g_tr, 1.0 - g_tr)
    decision_t = inference.decide(p_t, args.alpha, t)
    decision_c = (inference.Decision.FAIL_TO_REJECT if t == 0.0
                  else inference.decide(p_c, args.alpha, t))
    truncated = g_tr in (0.0, 1.0)
    if truncated:
        print("warning: expanded CDF was truncated at the observed statistic; "
              "the corrected p-value of 0 is a boundary artifact",
              file=sys.stderr)

    inputs = planning.PlanningInputs(
        alpha=args.alpha, epsilon=args.epsilon, k=design.k,
        x=GroupCumulants(x.variance, x.skewness, x.kurtosis),
        y=GroupCumulants(y.variance, y.skewness, y.kurtosis))
    n_needed = planning.n_min_second(planning.coefficient_a1(inputs),
                                     planning.coefficient_a2(inputs),
                                     args.epsilon)
    total = x.n + y.n
    if total < n_needed:
        print(f"warning: total sample N={total} is below the second-order "
              f"reliability threshold {n_needed} for epsilon={args.epsilon}; "
              "tail error control is not guaranteed", file=sys.stderr)

    report = Report(command="analyze", version=__version__, config={
        "control": control.source, "treatment": treatment.source,
        "alpha": args.alpha, "epsilon": args.epsilon})
    report.scalars.update(_summary_scalars("control", x))
    report.scalars.update(_summary_scalars("treatment", y))
    report.scalars.update({
        "k": design.k, "n_total": total,
        "statistic": t, "p_classic": p_t,
        "decision_classic": decision_t.value, "p_corrected": p_c,
        "decision_corrected": decision_c.value,
        "corrected_truncated": truncated,
        "gamma_d": cum.gamma_d, "tau_d": cum.tau_d,
        "n_min_second_plugin": n_needed,
        "below_reliability_threshold": total < n_needed})
    return report


def _cumulants_from_args(args: argparse.Namespace) -> tuple[GroupCumulants, GroupCumulants, float | None]:
    """Resolve per-group shape from --dist, explicit flags, or data files."""
    if args.dist is not None:
        pop = DistributionSpec.parse(args.dist).population_cumulants()
        return pop.as_group(), pop.as_group(), None
    if args.from_data is not None:
        control, treatment = (ingest(p) for p in args.from_data)
        x = summarize(control.values)
        y = summarize(treatment.values)
        return (GroupCumulants(x.variance, x.skewness, x.kurtosis),
                GroupCumulants(y.variance, y.skewness, y.kurtosis),
                y.n / x.n)
    def pick(per_group, shared, name, default=None):
        value = per_group if per_group is not None else shared
        if value is None:
            value = default
        if value is None:
            raise ConfigurationError(
                f"missing --{name}: give --dist, --from-data, or explicit cumulants")
        return value
    sigma_default = 1.0 if args.equal_variance else None
    x = GroupCumulants(
        variance=pick(args.sigma_x, args.sigma, "sigma", sigma_default) ** 2,
        skewness=pick(args.gamma_x, args.gamma, "gamma"),
        kurtosis=pick(args.tau_x, args.tau, "tau"))
    y = GroupCumulants(
        variance=pick(args.sigma_y, args.sigma, "sigma", sigma_default) ** 2,
        skewness=pick(args.gamma_y, args.gamma, "gamma"),
        kurtosis=pick(args.tau_y, args.tau, "tau"))
    return x, y, None


def cmd_plan(args: argparse.Namespace) -> Report:
    x, y, data_k = _cumulants_from_args(args)
    k = args.k if args.k is not None else data_k
    if k is None:
        raise ConfigurationError("missing --k (allocation ratio n_y/n_x)")
    inputs = planning.PlanningInputs(alpha=args.alpha, epsilon=args.epsilon,
                                     k=k, x=x, y=y)
    a1 = planning.coefficient_a1(inputs)
    a2 = planning.coefficient_a2(inputs)
    report = Report(command="plan", version=__version__, config={
        "alpha": args.alpha, "epsilon": args.epsilon, "k": k,
        "x_variance": x.variance, "x_skewness": x.skewness,
        "x_kurtosis": x.kurtosis, "y_variance": y.variance,
        "y_skewness": y.skewness, "y_kurtosis": y.kurtosis})
    report.scalars.update({
        "a1": a1, "a2": a2,
        "n_min_first": planning.n_min_first(a1, args.epsilon),
        "n_min_second": planning.n_min_second(a1, a2, args.epsilon)})
    if args.at:
        rows = []
        for n in args.at:
            dev_l, dev_r = planning.predicted_tail_deviation(n, inputs)
            rows.append((n, dev_l, dev_r, max(abs(dev_l), abs(dev_r))))
        report.add_table("predicted_deviations",
                         ["n_total", "dev_left", "dev_right", "max_abs_dev"],
                         rows)
    return report


def _resolve_spec(args: argparse.Namespace) -> DistributionSpec:
    if args.dist is not None and args.data is not None:
        raise ConfigurationError("give either --dist or --data, not both")
    if args.dist is not None:
        text = args.dist
        if text.startswith("empirical:"):
            return DistributionSpec.empirical(
                ingest(text.partition(":")[2]).values)
        return DistributionSpec.parse(text)
    if args.data is not None:
        return DistributionSpec.empirical(ingest(args.data).values)
    raise ConfigurationError("missing --dist (or --data for resampling)")


def _resolve_grid(args: argparse.Namespace,
                  spec: DistributionSpec) -> tuple[int, ...]:
    if args.grid:
        return tuple(args.grid)
    pop = spec.population_cumulants().as_group()
    inputs = planning.PlanningInputs(alpha=args.alpha, epsilon=args.epsilon,
                                     k=args.k, x=pop, y=pop)
    center = planning.n_min_second(planning.coefficient_a1(inputs),
                                   planning.coefficient_a2(inputs),
                                   args.epsilon)
    if center < 10:
        raise ConfigurationError(
            "cannot center an automatic grid (thresholds are tiny for this "
            "distribution); pass an explicit --grid")
    return tuple(simulate.auto_grid(center, args.k))


def _tail_table_rows(report: simulate.TailErrorReport) -> list[tuple]:
    return [(r.method, r.n_total, r.n_x, r.n_y,
             r.alpha_hat_left, r.se_left, r.alpha_hat_right, r.se_right,
             r.dev_left, r.dev_right, r.total_dev,
             "yes" if r.passed else "no", r.redraws)
            for r in report.rows]


_TAIL_COLUMNS = ["method", "n_total", "n_x", "n_y", "alpha_hat_left",
                 "se_left", "alpha_hat_right", "se_right", "dev_left",
                 "dev_right", "total_dev", "pass", "redraws"]


def _write_density(path: str, t_values: dict[int, np.ndarray]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("n_total", "bin_left", "bin_right", "count", "density"))
        for n_total in sorted(t_values):
            t = t_values[n_total]
            counts, edges = np.histogram(t, bins=64)
            widths = np.diff(edges)
            for i, count in enumerate(counts):
                writer.writerow((n_total, edges[i], edges[i + 1], int(count),
                                 count / (t.size * widths[i])))


def _sim_config(args: argparse.Namespace,
                grid: tuple[int, ...]) -> SimulationConfig:
    return SimulationConfig(alpha=args.alpha, epsilon=args.epsilon, k=args.k,
                            b=args.b, seed=args.seed, n_values=grid,
                            methods=tuple(args.methods))


def _sim_config_dict(config: SimulationConfig,
                     spec: DistributionSpec) -> dict:
    return {"dist": spec.describe(), "alpha": config.alpha,
            "epsilon": config.epsilon, "k": config.k, "B": config.b,
            "seed": config.seed, "grid": list(config.n_values),
            "methods": list(config.methods)}


def cmd_simulate(args: argparse.Namespace) -> Report:
    spec = _resolve_spec(args)
    config = _sim_config(args, _resolve_grid(args, spec))
    result = simulate.estimate_tail_errors(config, spec, n_jobs=args.jobs,
                                           collect_t=bool(args.emit_density))
    if args.emit_density:
        _write_density(args.emit_density, result.t_values)
    report = Report(command="simulate", version=__version__,
                    config=_sim_config_dict(config, spec))
    report.add_table("tail_errors", _TAIL_COLUMNS, _tail_table_rows(result))
    return report


def cmd_sweep(args: argparse.Namespace) -> Report:
    spec = _resolve_spec(args)
    pop = spec.population_cumulants().as_group()
    inputs = planning.PlanningInputs(alpha=args.alpha, epsilon=args.epsilon,
                                     k=args.k, x=pop, y=pop)
    a1 = planning.coefficient_a1(inputs)
    a2 = planning.coefficient_a2(inputs)
    n1 = planning.n_min_first(a1, args.epsilon)
    n2 = planning.n_min_second(a1, a2, args.epsilon)
    config = _sim_config(args, _resolve_grid(args, spec))
    result = simulate.estimate_tail_errors(config, spec, n_jobs=args.jobs)
    report = Report(command="sweep", version=__version__,
                    config=_sim_config_dict(config, spec))
    report.scalars.update({"a1": a1, "a2": a2, "n_min_first": n1,
                           "n_min_second": n2})
    for method in config.methods:
        report.scalars[f"empirical_min_n_{method}"] = \
            simulate.find_min_passing(result, method)
    report.add_table("tail_errors", _TAIL_COLUMNS, _tail_table_rows(result))
    return report


def _comma_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _comma_methods(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigurationError(
            f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.05,
                        help="nominal significance level (default 0.05)")
    parser.add_argument("--epsilon", type=float, default=0.01,
                        help="per-tail Type I error tolerance (default 0.01)")
    parser.add_argument("--format", choices=("json", "csv", "table"),
                        default="table", help="output format")


def _add_sim_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dist", help="family:params, e.g. lognormal:0,1, "
                        "normal:0,1, gamma:2,1.5, or empirical:data.csv")
    parser.add_argument("--data", help="CSV dataset to resample (empirical mode)")
    parser.add_argument("--k", type=float, default=1.0,
                        help="allocation ratio n_y/n_x (default 1)")
    parser.add_argument("--B", dest="b", type=int, default=10_000,
                        help="replications per N (default 10000)")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--grid", type=_comma_ints, default=None,
                        help="explicit comma-separated total sample sizes")
    parser.add_argument("--methods", type=_comma_methods,
                        default=list(simulate.METHODS),
                        help="subset of classic,corrected (default both)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reliab",
        description="Trustworthy two-sample A/B testing under skewed data "
                    "and unequal allocation.")
    parser.add_argument("--version", action="version",
                        version=f"reliab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", help="two-sample test on CSV data")
    p.add_argument("control", help="control CSV (or combined group,value CSV)")
    p.add_argument("treatment", nargs="?", default=None,
                   help="treatment CSV (omit for a combined file)")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plan", help="minimum sample sizes from cumulants")
    p.add_argument("--dist", help="named distribution, e.g. lognormal:0,1")
    p.add_argument("--from-data", nargs=2, metavar=("CONTROL", "TREATMENT"),
                   default=None, help="estimate cumulants from two CSV files")
    p.add_argument("--gamma", type=float, help="skewness for both groups")
    p.add_argument("--tau", type=float, help="kurtosis for both groups")
    p.add_argument("--sigma", type=float, help="standard deviation for both groups")
    p.add_argument("--gamma-x", type=float, help="control skewness")
    p.add_argument("--gamma-y", type=float, help="treatment skewness")
    p.add_argument("--tau-x", type=float, help="control kurtosis")
    p.add_argument("--tau-y", type=float, help="treatment kurtosis")
    p.add_argument("--sigma-x", type=float, help="control standard deviation")
    p.add_argument("--sigma-y", type=float, help="treatment standard deviation")
    p.add_argument("--equal-variance", action="store_true",
                   help="assume equal group variances (they cancel)")
    p.add_argument("--k", type=float, default=None,
                   help="allocation ratio n_y/n_x")
    p.add_argument("--at", type=int, action="append", default=[],
                   help="predict tail deviations at this total N (repeatable)")
    _add_common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="Monte Carlo tail-error table")
    _add_sim_options(p)
    p.add_argument("--emit-density", metavar="PATH", default=None,
                   help="also write a per-N histogram CSV of the statistic")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="empirical minimal N vs theory")
    _add_sim_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        if hasattr(args, "methods"):
            bad = [m for m in args.methods if m not in simulate.METHODS]
            if bad:
                raise ConfigurationError(
                    f"unknown methods {bad}; choose from {list(simulate.METHODS)}")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = args.func(args)
        for warning in caught:
            print(f"warning: {warning.message}", file=sys.stderr)
        sys.stdout.write(report.render(args.format))
        return 0
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, NumericError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
