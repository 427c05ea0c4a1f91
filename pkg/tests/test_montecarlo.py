import math

import mpmath
import numpy as np
import pytest

from pilotsense import (AnalyticMode, DetectorKind, DomainError, Hypothesis, SensingParams,
                        TrialPlan, estimate_error_rates, estimate_statistic_moments,
                        threshold_for_pfa, wilson_interval)
from pilotsense.montecarlo import EmpiricalEstimate, sample_moments

PILOT = DetectorKind.CONVENTIONAL_PILOT


def wilson_oracle(k, n, confidence):
    mpmath.mp.dps = 40
    z = mpmath.sqrt(2) * mpmath.erfinv(mpmath.mpf(confidence))
    p = mpmath.mpf(k) / n
    d = 1 + z ** 2 / n
    c = (p + z ** 2 / (2 * n)) / d
    h = z / d * mpmath.sqrt(p * (1 - p) / n + z ** 2 / (4 * n * n))
    return float(c - h), float(c + h)


def test_wilson_examples():
    low, high = wilson_interval(50, 100, 0.95)
    assert low == pytest.approx(0.4038, abs=1e-3)
    assert high == pytest.approx(0.5962, abs=1e-3)
    assert wilson_interval(0, 37, 0.9)[0] == 0.0
    assert wilson_interval(37, 37, 0.9)[1] == 1.0


@pytest.mark.parametrize("k, n, conf", [(1, 10, 0.95), (50, 100, 0.95), (3, 200000, 0.99),
                                        (19990, 20000, 0.8)])
def test_wilson_matches_oracle(k, n, conf):
    assert wilson_interval(k, n, conf) == pytest.approx(wilson_oracle(k, n, conf), abs=1e-12)


@pytest.mark.parametrize("args", [(-1, 10, 0.95), (11, 10, 0.95), (0, 0, 0.95), (1, 10, 1.0)])
def test_wilson_domain(args):
    with pytest.raises(DomainError):
        wilson_interval(*args)


def test_wilson_width_shrinks_by_root_two():
    for n in (1000, 20000, 200000):
        w1 = np.subtract(*wilson_interval(n // 10, n)[::-1])
        w2 = np.subtract(*wilson_interval(2 * n // 10, 2 * n)[::-1])
        assert w1 / w2 == pytest.approx(math.sqrt(2), rel=0.10)


def test_empirical_estimate_invariants():
    est = EmpiricalEstimate.from_counts(7, 50)
    assert est.proportion == 7 / 50
    assert 0.0 <= est.ci_low <= est.proportion <= est.ci_high <= 1.0


def test_extreme_threshold(paper_params):
    rates = estimate_error_rates(TrialPlan(paper_params, DetectorKind.NEYMAN_PEARSON, -1e9,
                                           500, 500, master_seed=3))
    assert rates.p_fa.proportion == 1.0
    assert rates.p_md.proportion == 0.0


def test_zero_trials_rejected(paper_params):
    with pytest.raises(DomainError):
        estimate_error_rates(TrialPlan(paper_params, PILOT, 0.0, 0, 10))


def test_pilot_false_alarm_rate(paper_params):
    thr = threshold_for_pfa(PILOT, paper_params, 0.1, AnalyticMode.PAPER)
    rates = estimate_error_rates(TrialPlan(paper_params, PILOT, thr, 200_000, 1, master_seed=1))
    assert rates.p_fa.proportion == pytest.approx(0.1, abs=3 * math.sqrt(0.1 * 0.9 / 200_000))


def test_error_rates_deterministic(paper_params):
    plan = TrialPlan(paper_params, DetectorKind.NEYMAN_PEARSON, 1.2, 5000, 5000, 42, 3)
    assert estimate_error_rates(plan) == estimate_error_rates(plan, workers=3, chunk_size=333)


def test_pilot_h0_moments(paper_params):
    est = estimate_statistic_moments(paper_params, PILOT, Hypothesis.H0, 200_000, master_seed=8)
    expected_var = paper_params.power * paper_params.noise_variance / paper_params.n_samples
    assert abs(est.mean) < 3 * est.se_mean
    assert abs(est.variance - expected_var) < 3 * est.se_variance


def test_two_trial_moments_deterministic(paper_params):
    a = estimate_statistic_moments(paper_params, PILOT, Hypothesis.H1, 2, master_seed=4)
    b = estimate_statistic_moments(paper_params, PILOT, Hypothesis.H1, 2, master_seed=4)
    assert a == b
    assert a.trials == 2 and a.se_mean > 0 and a.se_variance > 0


def test_moments_reject_single_trial(paper_params):
    with pytest.raises(DomainError):
        estimate_statistic_moments(paper_params, PILOT, Hypothesis.H0, 1)


def test_sample_moments_order_insensitive():
    rng = np.random.default_rng(0)
    values = rng.normal(3.0, 2.0, 10_001)
    a = sample_moments(values)
    b = sample_moments(values[rng.permutation(values.size)])
    assert a == b


def test_variance_standard_error_scale():
    # Gaussian data: SE of the sample variance is about var * sqrt(2 / n)
    values = np.random.default_rng(1).normal(0.0, 3.0, 400_000)
    est = sample_moments(values)
    assert est.se_variance == pytest.approx(9.0 * math.sqrt(2 / 400_000), rel=0.02)


def test_wilson_coverage_exact_case():
    # pilot detector under H0 is exactly Gaussian, so the analytic P_FA is exact
    params = SensingParams(0.1, 0.31623, 1.0, 50)
    target = 0.1
    thr = threshold_for_pfa(PILOT, params, target, AnalyticMode.PAPER)
    covered = 0
    for seed in range(100):
        rates = estimate_error_rates(TrialPlan(params, PILOT, thr, 2000, 1, master_seed=seed))
        covered += rates.p_fa.ci_low <= target <= rates.p_fa.ci_high
    assert covered >= 90
