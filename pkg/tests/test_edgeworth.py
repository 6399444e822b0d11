"""Difference cumulants and the corrected p-value chain.

The golden-pair expectation below was produced by an independent
straight-line transcription of the formulas (plain python sums plus
scipy.stats.norm), sharing no code with the package; the transcription
is reproduced here as the oracle.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm as spnorm

from reliab import edgeworth, inference, stdnorm
from reliab.edgeworth import (DifferenceCumulants, difference_cumulants,
                              g_hat, g_hat_truncated, p_value_corrected, q1,
                              q2, two_sample_test)
from reliab.errors import DegenerateSampleError
from reliab.inference import Decision, DesignContext
from reliab.moments import GroupCumulants, GroupSummary, summarize

GOLDEN_X = [1.0, 2.0, 3.0, 4.0, 100.0]
GOLDEN_Y = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 200.0]


def transcription_p_corrected(x_vals, y_vals):
    """Straight-line re-derivation: raw lists in, corrected p-value out."""
    def mom(v):
        n = len(v)
        m = sum(v) / n
        s2 = sum((u - m) ** 2 for u in v) / n
        g = sum((u - m) ** 3 for u in v) / (n * s2 ** 1.5)
        t = sum((u - m) ** 4 for u in v) / (n * s2 ** 2)
        return n, m, s2, g, t

    nx, mx, vx, gx, tx = mom(x_vals)
    ny, my, vy, gy, ty = mom(y_vals)
    t_stat = (my - mx) / math.sqrt(vx / nx + vy / ny)
    k = ny / nx
    n_tot = nx + ny
    g_d = (math.sqrt((1 + k) / (n_tot * k))
           * (gy * vy ** 1.5 - k * k * gx * vx ** 1.5) / (k * vx + vy) ** 1.5)
    t_d = (3 + (1 + k) / (k * n_tot)
           * ((ty - 3) * vy ** 2 + k ** 3 * (tx - 3) * vx ** 2)
           / (vy + k * vx) ** 2)
    z = t_stat
    poly1 = g_d / 6 * (2 * z * z + 1)
    poly2 = ((t_d - 3) / 12 * (z ** 3 - 3 * z)
             - g_d ** 2 / 18 * (z ** 5 + 2 * z ** 3 - 3 * z)
             - (1 + k) / (4 * n_tot)
             * ((k ** 3 * vx ** 2 + vy ** 2) * (z ** 3 + 3 * z)
                + 2 * k * (1 + k) * vx * vy * z)
             / (k * (k * vx + vy) ** 2))
    g_cdf = spnorm.cdf(z) + spnorm.pdf(z) * (poly1 + poly2)
    g_tr = min(max(g_cdf, 0.0), 1.0)
    return t_stat, 2 * min(g_tr, 1 - g_tr)


def cum(var, skew, kurt):
    return GroupCumulants(variance=var, skewness=skew, kurtosis=kurt)


def test_gamma_d_zero_for_symmetric_groups():
    d = difference_cumulants(cum(2.0, 0.0, 5.0), cum(0.7, 0.0, 9.0),
                             DesignContext.from_ratio(3.7, 4100.0))
    assert d.gamma_d == 0.0


def test_tau_d_three_for_normal_kurtosis():
    d = difference_cumulants(cum(2.0, 1.0, 3.0), cum(0.7, -2.0, 3.0),
                             DesignContext.from_ratio(3.7, 4100.0))
    assert d.tau_d == 3.0


def test_difference_cumulants_match_simulated_differences():
    # light version of the theory-vs-simulation oracle (acceptance runs
    # the full-size one): sample moments of simulated mean differences
    rng = np.random.default_rng(99)
    n_x, n_y, reps = 200, 1000, 200_000
    out = np.empty(reps)
    done = 0
    while done < reps:
        b = min(20_000, reps - done)
        xm = rng.lognormal(0, 1, size=(b, n_x)).mean(axis=1)
        ym = rng.lognormal(0, 1, size=(b, n_y)).mean(axis=1)
        out[done:done + b] = ym - xm
        done += b
    d = out - out.mean()
    s2 = (d ** 2).mean()
    sim_gamma = (d ** 3).mean() / s2 ** 1.5
    sim_tau = (d ** 4).mean() / s2 ** 2
    ln = cum(math.e * (math.e - 1), (math.e + 2) * math.sqrt(math.e - 1),
             math.e ** 4 + 2 * math.e ** 3 + 3 * math.e ** 2 - 3)
    theory = difference_cumulants(ln, ln, DesignContext.from_sizes(n_x, n_y))
    assert theory.gamma_d == pytest.approx(sim_gamma, rel=0.10)
    assert theory.tau_d == pytest.approx(sim_tau, rel=0.10)


def test_degenerate_variance_rejected():
    with pytest.raises(DegenerateSampleError):
        difference_cumulants(cum(0.0, 0.0, 3.0), cum(1.0, 0.0, 3.0),
                             DesignContext.from_ratio(1.0, 100.0))


def test_q1_zero_coefficient():
    d = DifferenceCumulants(gamma_d=0.0, tau_d=3.4)
    for z in (-2.0, 0.0, 1.7):
        assert q1(z, d) == 0.0


def test_q1_at_origin():
    d = DifferenceCumulants(gamma_d=0.42, tau_d=3.0)
    assert q1(0.0, d) == pytest.approx(0.42 / 6.0, abs=1e-16)


def test_q1_direct_evaluation():
    d = DifferenceCumulants(gamma_d=0.6, tau_d=3.0)
    assert q1(1.0, d) == pytest.approx(0.3, abs=1e-15)


def test_q2_vanishes_at_origin():
    d = DifferenceCumulants(gamma_d=0.3, tau_d=4.1)
    design = DesignContext.from_ratio(2.0, 500.0)
    assert q2(0.0, d, 1.3, 0.8, design) == 0.0


def test_q2_third_term_hand_value():
    # gamma_d=0 and tau_d=3 silence the first two terms; with k=1,
    # unit variances, z=1, N=100 the studentization term is
    # (2/400) * ((1+1)*4 + 2*1*2*1) / (1*4) = 0.015
    d = DifferenceCumulants(gamma_d=0.0, tau_d=3.0)
    design = DesignContext.from_ratio(1.0, 100.0)
    assert q2(1.0, d, 1.0, 1.0, design) == pytest.approx(-0.015, abs=1e-15)


@given(st.floats(-6, 6), st.floats(-2, 2), st.floats(1, 40),
       st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.2, 5))
@settings(max_examples=200, deadline=None)
def test_q2_is_odd_in_z(z, gamma_d, tau_d, x_var, y_var, k):
    d = DifferenceCumulants(gamma_d=gamma_d, tau_d=tau_d)
    design = DesignContext.from_ratio(k, 900.0)
    forward = q2(z, d, x_var, y_var, design)
    backward = q2(-z, d, x_var, y_var, design)
    assert forward == pytest.approx(-backward, rel=1e-12, abs=1e-12)


def test_g_hat_reduces_to_normal_cdf_when_corrections_vanish():
    # corrections are O(1/sqrt(N)); at astronomically large N the
    # expanded CDF collapses onto the plain normal CDF
    d = DifferenceCumulants(gamma_d=0.0, tau_d=3.0)
    design = DesignContext.from_ratio(1.0, 1e18)
    for z in (-3.0, -0.5, 0.0, 1.0, 2.5):
        assert g_hat(z, d, 1.0, 1.0, design) == pytest.approx(
            stdnorm.cdf(z), abs=1e-9)


def test_g_hat_truncated_stays_in_unit_interval():
    d = DifferenceCumulants(gamma_d=-8.0, tau_d=300.0)
    design = DesignContext.from_ratio(4.0, 40.0)
    for z in np.linspace(-10, 10, 101):
        assert 0.0 <= g_hat_truncated(float(z), d, 2.0, 3.0, design) <= 1.0


def test_g_hat_truncated_far_right_tail_is_one():
    d = DifferenceCumulants(gamma_d=0.2, tau_d=4.0)
    design = DesignContext.from_ratio(2.0, 5000.0)
    assert g_hat_truncated(8.0, d, 1.0, 1.0, design) == pytest.approx(
        1.0, abs=1e-10)


def test_p_value_corrected_golden_pair_matches_transcription():
    x = summarize(GOLDEN_X)
    y = summarize(GOLDEN_Y)
    t = inference.welch_statistic(x, y)
    oracle_t, oracle_p = transcription_p_corrected(GOLDEN_X, GOLDEN_Y)
    assert t == pytest.approx(oracle_t, rel=1e-12)
    assert p_value_corrected(t, x, y) == pytest.approx(oracle_p, rel=1e-12)
    # frozen from the transcription run
    assert p_value_corrected(t, x, y) == pytest.approx(0.8927946461895493,
                                                       rel=1e-12)


def test_p_value_corrected_approaches_classic_for_huge_samples():
    x = GroupSummary(n=10 ** 12, mean=0.0, variance=1.0, skewness=0.1,
                     kurtosis=3.2)
    y = GroupSummary(n=10 ** 12, mean=1e-6, variance=1.0, skewness=0.1,
                     kurtosis=3.2)
    t = inference.welch_statistic(x, y)
    assert p_value_corrected(t, x, y) == pytest.approx(
        inference.p_value_classic(t), abs=1e-6)


def test_corrected_and_classic_agree_for_normal_data():
    # symmetric data, k=1: corrections are O(1/sqrt(N)) with skewness
    # near zero, so the two p-values must essentially coincide
    rng = np.random.default_rng(12)
    close = 0
    reps = 300
    for rep in range(reps):
        x = summarize(rng.normal(0, 1, size=5000))
        y = summarize(rng.normal(0, 1, size=5000))
        t = inference.welch_statistic(x, y)
        p_t = inference.p_value_classic(t)
        p_c = p_value_corrected(t, x, y)
        if abs(p_c - p_t) <= 0.01:
            close += 1
    assert close / reps >= 0.95


swap_cumulants = st.tuples(
    st.floats(0.2, 8.0), st.floats(-3.0, 3.0), st.floats(1.5, 60.0),
    st.floats(0.2, 8.0), st.floats(-3.0, 3.0), st.floats(1.5, 60.0),
    st.floats(0.05, 20.0))


@given(swap_cumulants)
@settings(max_examples=200, deadline=None)
def test_group_swap_antisymmetry_and_symmetry(params):
    vx, gx, tx, vy, gy, ty, k = params
    x, y = cum(vx, gx, tx), cum(vy, gy, ty)
    n_tot = 2400.0
    fwd = difference_cumulants(x, y, DesignContext.from_ratio(k, n_tot))
    rev = difference_cumulants(y, x, DesignContext.from_ratio(1.0 / k, n_tot))
    assert fwd.gamma_d == pytest.approx(-rev.gamma_d, rel=1e-9, abs=1e-9)
    assert fwd.tau_d == pytest.approx(rev.tau_d, rel=1e-9, abs=1e-9)


def test_scaling_laws_in_total_size():
    x, y = cum(4.0, 2.2, 12.0), cum(1.0, 1.1, 8.0)
    base = difference_cumulants(x, y, DesignContext.from_sizes(300, 900))
    double = difference_cumulants(x, y, DesignContext.from_sizes(600, 1800))
    assert double.gamma_d == pytest.approx(base.gamma_d / math.sqrt(2.0),
                                           rel=1e-9)
    assert double.tau_d - 3.0 == pytest.approx((base.tau_d - 3.0) / 2.0,
                                               rel=1e-9)


fuzzed_summary = st.builds(
    GroupSummary,
    n=st.integers(min_value=2, max_value=10 ** 7),
    mean=st.floats(-1e5, 1e5),
    variance=st.floats(1e-6, 1e8),
    skewness=st.floats(-50.0, 50.0),
    kurtosis=st.floats(-10.0, 5000.0))


@given(fuzzed_summary, fuzzed_summary, st.floats(-30.0, 30.0))
@settings(max_examples=300, deadline=None)
def test_corrected_p_value_always_in_unit_interval(x, y, t):
    assert 0.0 <= p_value_corrected(t, x, y) <= 1.0


def test_scale_invariance_of_whole_chain():
    rng = np.random.default_rng(21)
    x_data = rng.lognormal(0, 1, size=400)
    y_data = rng.lognormal(0, 1, size=1200)
    c = 739.0

    def chain(xd, yd):
        x, y = summarize(xd), summarize(yd)
        design = DesignContext.from_sizes(x.n, y.n)
        t = inference.welch_statistic(x, y)
        d = difference_cumulants(x, y, design)
        return (t, x.skewness, y.kurtosis, d.gamma_d, d.tau_d,
                inference.p_value_classic(t), p_value_corrected(t, x, y))

    base = chain(x_data, y_data)
    scaled = chain(x_data * c, y_data * c)
    for got, want in zip(scaled, base):
        assert got == pytest.approx(want, abs=1e-9, rel=1e-9)


def test_two_sample_test_round_trip():
    x = summarize(GOLDEN_X)
    y = summarize(GOLDEN_Y)
    result = two_sample_test(x, y, alpha=0.05)
    assert result.decision_classic is Decision.FAIL_TO_REJECT
    assert result.p_corrected == pytest.approx(0.8927946461895493, rel=1e-12)
    bare = two_sample_test(x, y, alpha=0.05, corrected=False)
    assert bare.p_corrected is None


def test_two_sample_test_zero_statistic_never_rejects_corrected():
    x = GroupSummary(n=50, mean=1.0, variance=2.0, skewness=1.0, kurtosis=6.0)
    result = two_sample_test(x, x, alpha=0.9)
    assert result.statistic == 0.0
    assert result.decision_corrected is Decision.FAIL_TO_REJECT
