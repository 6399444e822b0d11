"""Monte Carlo harness: sampling, splitting, determinism, tail rates."""

import math

import numpy as np
import pytest

from reliab import simulate
from reliab.errors import (ConfigurationError, DataError,
                           DegenerateSampleError)
from reliab.moments import summarize
from reliab.simulate import (CLASSIC, CORRECTED, DistributionSpec,
                             SimulationConfig, auto_grid, collect_statistics,
                             estimate_tail_errors, find_min_passing,
                             replication_stream, run_replication,
                             sample_group, split_sizes, sweep_min_n)


def test_parse_distribution_strings():
    assert DistributionSpec.parse("lognormal:0,1").family == "lognormal"
    assert DistributionSpec.parse("normal: 2, 3 ").params == (2.0, 3.0)
    assert DistributionSpec.parse("gamma:2,1.5").params == (2.0, 1.5)
    with pytest.raises(ConfigurationError):
        DistributionSpec.parse("weibull:1,2")
    with pytest.raises(ConfigurationError):
        DistributionSpec.parse("normal:1")
    with pytest.raises(ConfigurationError):
        DistributionSpec.parse("normal:a,b")
    with pytest.raises(ConfigurationError):
        DistributionSpec.normal(0, 0.0)
    with pytest.raises(ConfigurationError):
        DistributionSpec.gamma(-1, 1)


def test_empirical_spec_validation():
    with pytest.raises(ConfigurationError):
        DistributionSpec.empirical([])
    with pytest.raises(DataError):
        DistributionSpec.empirical([1.0, float("nan")])


def test_population_cumulants_closed_forms():
    normal = DistributionSpec.normal(2.0, 3.0).population_cumulants()
    assert normal == (2.0, 9.0, 0.0, 3.0)
    gamma = DistributionSpec.gamma(4.0, 0.5).population_cumulants()
    assert gamma.mean == pytest.approx(2.0)
    assert gamma.variance == pytest.approx(1.0)
    assert gamma.skewness == pytest.approx(1.0)
    assert gamma.kurtosis == pytest.approx(4.5)
    data = [1.0, 2.0, 5.0, 9.0]
    emp = DistributionSpec.empirical(data).population_cumulants()
    s = summarize(data)
    assert emp.variance == pytest.approx(s.variance)
    assert emp.kurtosis == pytest.approx(s.kurtosis)


def test_sample_group_normal_mean_within_clt_band():
    spec = DistributionSpec.normal(0.0, 1.0)
    draw = sample_group(spec, 10 ** 6, replication_stream(7, 10 ** 6, 0))
    assert abs(draw.mean()) <= 4.0 / math.sqrt(10 ** 6)


def test_sample_group_lognormal_skewness_near_population():
    spec = DistributionSpec.lognormal(0.0, 1.0)
    draw = sample_group(spec, 10 ** 6, replication_stream(1, 10 ** 6, 0))
    assert summarize(draw).skewness == pytest.approx(6.18488, rel=0.10)


def test_sample_group_single_atom_dataset():
    spec = DistributionSpec.empirical([5.0])
    draw = sample_group(spec, 50, replication_stream(0, 50, 0))
    assert (draw == 5.0).all()


def test_split_sizes_paper_grid_points():
    assert split_sizes(5988, 5.0) == (998, 4990)
    assert split_sizes(6, 1.0) == (3, 3)
    assert split_sizes(2200, 10.0) == (200, 2000)


def test_split_sizes_rejects_too_small_totals():
    with pytest.raises(ConfigurationError):
        split_sizes(10, 10.0)


def test_run_replication_two_point_dataset():
    spec = DistributionSpec.empirical([0.0, 1.0])
    rng = replication_stream(3, 40, 0)
    result = run_replication(spec, 20, 20, rng)
    assert math.isfinite(result.statistic)
    assert 0.0 <= result.p_classic <= 1.0
    assert 0.0 <= result.p_corrected <= 1.0


def test_run_replication_degenerate_draw_raises():
    spec = DistributionSpec.empirical([7.0])
    with pytest.raises(DegenerateSampleError):
        run_replication(spec, 5, 5, replication_stream(0, 10, 0))


def test_replication_is_deterministic():
    spec = DistributionSpec.lognormal(0.0, 1.0)
    a = run_replication(spec, 50, 150, replication_stream(11, 200, 4))
    b = run_replication(spec, 50, 150, replication_stream(11, 200, 4))
    assert a == b


def test_reports_bit_identical_across_worker_counts():
    spec = DistributionSpec.gamma(2.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.02, k=2.0, b=600,
                              seed=99, n_values=(60, 120))
    serial = estimate_tail_errors(config, spec, n_jobs=1, collect_t=True)
    quad = estimate_tail_errors(config, spec, n_jobs=4, collect_t=True)
    assert serial.rows == quad.rows
    for n in config.n_values:
        assert np.array_equal(serial.t_values[n], quad.t_values[n])


def test_redraws_counted_for_degenerate_prone_dataset():
    spec = DistributionSpec.empirical([0.0, 0.0, 0.0, 1.0])
    config = SimulationConfig(alpha=0.05, epsilon=0.02, k=1.0, b=200,
                              seed=5, n_values=(4,))
    report = estimate_tail_errors(config, spec)
    assert report.rows[0].redraws > 0


def test_zero_rejections_give_zero_tail_rates():
    spec = DistributionSpec.normal(0.0, 1.0)
    config = SimulationConfig(alpha=1e-12, epsilon=0.02, k=1.0, b=200,
                              seed=1, n_values=(40,))
    report = estimate_tail_errors(config, spec)
    row = report.row(CLASSIC, 40)
    assert row.alpha_hat_left == row.alpha_hat_right == 0.0
    assert row.se_left == row.se_right == 0.0


def test_tail_rates_bounded_and_consistent():
    spec = DistributionSpec.lognormal(0.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.01, k=5.0, b=500,
                              seed=17, n_values=(300,))
    report = estimate_tail_errors(config, spec)
    for row in report.rows:
        total = row.alpha_hat_left + row.alpha_hat_right
        assert 0.0 <= total <= 1.0
        assert row.total_dev == pytest.approx(abs(total - 0.05), abs=1e-15)


def test_opposite_tail_signs_for_skewed_unequal_allocation():
    spec = DistributionSpec.lognormal(0.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.01, k=5.0, b=3000,
                              seed=8, n_values=(1500, 2376))
    report = estimate_tail_errors(config, spec)
    for n in config.n_values:
        row = report.row(CLASSIC, n)
        assert row.dev_left < 0.0 < row.dev_right


def test_auto_grid_endpoint_arithmetic():
    assert auto_grid(10) == [2, 3, 6, 10, 17, 29, 50]


def test_auto_grid_geometric_spacing():
    grid = auto_grid(5986, 5.0)
    assert grid[0] == pytest.approx(5986 / 5, rel=0.01)
    assert grid[-1] == pytest.approx(5986 * 5, rel=0.01)
    assert len(grid) == 7
    ratios = [b / a for a, b in zip(grid, grid[1:])]
    for r in ratios:
        assert r == pytest.approx(25.0 ** (1 / 6), rel=0.01)
    assert all(a < b for a, b in zip(grid, grid[1:]))
    for n in grid:
        split_sizes(n, 5.0)


def test_auto_grid_strictly_increasing_for_tiny_centers():
    grid = auto_grid(10, 1.0)
    assert all(a < b for a, b in zip(grid, grid[1:]))
    for n in grid:
        split_sizes(n, 1.0)


def test_find_min_passing_and_sweep():
    spec = DistributionSpec.normal(0.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.49, k=1.0, b=200,
                              seed=3, n_values=(40, 80, 160))
    assert sweep_min_n(config, spec, method=CLASSIC) == 40
    tight = SimulationConfig(alpha=0.05, epsilon=1e-9, k=1.0, b=200,
                             seed=3, n_values=(40, 80))
    report = estimate_tail_errors(tight, spec)
    assert find_min_passing(report, CLASSIC) is None
    with pytest.raises(ConfigurationError):
        sweep_min_n(config, spec, method="bogus")


def test_collect_statistics_shape_and_symmetry():
    spec = DistributionSpec.normal(0.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.01, k=1.0, b=2000,
                              seed=6, n_values=(400,))
    t = collect_statistics(config, spec, 400)
    assert t.shape == (2000,)
    assert abs(t.mean()) <= 4.0 / math.sqrt(2000)


def test_collect_statistics_skew_structure_for_lognormal_unequal():
    # small control group, large treatment group: rare huge control
    # means are damped by their own variance estimate, so the statistic
    # ends up right-skewed with the bulk shifted right -- the shape
    # behind the inflated right-tail rejection rate
    spec = DistributionSpec.lognormal(0.0, 1.0)
    config = SimulationConfig(alpha=0.05, epsilon=0.01, k=10.0, b=2000,
                              seed=6, n_values=(1100,))
    t = collect_statistics(config, spec, 1100)
    s = summarize(t)
    assert s.skewness > 0.0
    assert s.mean > 0.0
    right = float(np.mean(t > 1.959963985))
    left = float(np.mean(t < -1.959963985))
    assert right > 0.025 > left


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SimulationConfig(b=50, n_values=(100,))
    with pytest.raises(ConfigurationError):
        SimulationConfig(b=200, n_values=())
    with pytest.raises(ConfigurationError):
        SimulationConfig(b=200, n_values=(100,), methods=("bogus",))
    with pytest.raises(ConfigurationError):
        SimulationConfig(b=200, n_values=(3,), k=1.0)
    with pytest.raises(ConfigurationError):
        SimulationConfig(b=200, n_values=(100,), alpha=1.5)


def test_binomial_se_quartering():
    assert simulate._binomial_se(0.025, 40_000) == pytest.approx(
        simulate._binomial_se(0.025, 10_000) / 2.0, rel=1e-12)


def test_empirical_zero_variance_dataset_rejected_by_engine():
    spec = DistributionSpec.empirical([3.0, 3.0, 3.0])
    config = SimulationConfig(alpha=0.05, epsilon=0.01, k=1.0, b=100,
                              seed=0, n_values=(10,))
    with pytest.raises(DegenerateSampleError):
        estimate_tail_errors(config, spec)
