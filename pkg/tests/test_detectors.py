import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pilotsense import (DetectorKind, Hypothesis, ObservationBlock, PilotSequence, SensingParams,
                        decide, log_likelihood_ratio, make_pilot, stat_energy, stat_np,
                        stat_pilot)
from pilotsense.detectors import Statistic, llr_affine_map, pilot_weight
from pilotsense.montecarlo import simulate_statistic


def _pilot(values, power=1.0):
    return PilotSequence(np.asarray(values, dtype=float), power)


def _obs(values):
    return ObservationBlock(np.asarray(values, dtype=float))


def test_stat_pilot_examples():
    ones = _pilot([1, 1, 1, 1])
    assert stat_pilot(ones, _obs([0, 0, 0, 0])).value == 0.0
    assert stat_pilot(ones, _obs([1, -1, 1, -1])).value == 0.0
    assert stat_pilot(ones, _obs([2, 2, 2, 2])).value == 2.0
    assert stat_pilot(ones, _obs([2, 2, 2, 2])).kind is DetectorKind.CONVENTIONAL_PILOT


def test_stat_pilot_length_mismatch():
    with pytest.raises(ValueError):
        stat_pilot(_pilot([1, 1]), _obs([1, 1, 1]))


def test_stat_energy_examples():
    assert stat_energy(_obs([1, -1, 1, -1])).value == 1.0
    assert stat_energy(_obs([0, 0])).value == 0.0
    assert stat_energy(_obs([2, 0])).value == 2.0


def test_stat_np_example():
    params = SensingParams(0.1, 1.0, 1.0, 2)
    # (1/2) * (1 + 2*sqrt(0.1)/0.9)
    value = stat_np(params, _pilot([1, 1]), _obs([1, 0])).value
    assert value == pytest.approx(0.851364184463, abs=1e-10)
    assert stat_np(params, _pilot([1, 1]), _obs([0, 0])).value == 0.0


@given(arrays(np.float64, 20, elements=st.floats(-50, 50)))
def test_stat_np_zero_theta_is_energy(y):
    params = SensingParams(0.0, 1.3, 1.0, 20)
    pilot = make_pilot(params, 0)
    assert stat_np(params, pilot, _obs(y)).value == stat_energy(_obs(y)).value


@given(arrays(np.float64, 12, elements=st.floats(-20, 20)),
       arrays(np.float64, 12, elements=st.floats(-20, 20)),
       st.floats(-5, 5))
def test_linearity(y1, y2, scale):
    params = SensingParams(0.25, 0.9, 2.0, 12)
    pilot = make_pilot(params, 5)
    lhs = stat_pilot(pilot, _obs(y1 + scale * y2)).value
    rhs = stat_pilot(pilot, _obs(y1)).value + scale * stat_pilot(pilot, _obs(y2)).value
    assert lhs == pytest.approx(rhs, abs=1e-9)
    n = params.n_samples
    np_total = stat_np(params, pilot, _obs(y1)).value * n
    split = (stat_energy(_obs(y1)).value * n
             + pilot_weight(params) * n * stat_pilot(pilot, _obs(y1)).value)
    assert np_total == pytest.approx(split, rel=1e-12, abs=1e-12)


def test_llr_single_sample_unit_power():
    params = SensingParams(0.1, 1.0, 1.0, 1)
    # -theta*P / (2 (P_data + sigma^2)) - 0.5 ln(P_data + sigma^2), P = 1
    expected = -0.1 / (2 * 1.9) - 0.5 * math.log(1.9)
    assert log_likelihood_ratio(params, _pilot([1.0]), _obs([0.0])) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(-0.3472427, abs=1e-6)


def test_llr_single_sample_paper_snr():
    params = SensingParams(0.1, 0.31623, 1.0, 1)
    pilot = make_pilot(params, 0)
    assert log_likelihood_ratio(params, pilot, _obs([0.0])) == pytest.approx(-0.1375349, abs=1e-6)


def test_llr_zero_theta_origin():
    params = SensingParams(0.0, 2.0, 1.0, 1)
    assert log_likelihood_ratio(params, _pilot([math.sqrt(2.0)], 2.0), _obs([0.0])) == \
        pytest.approx(-0.5 * math.log(3.0), abs=1e-14)


def test_llr_far_along_pilot_is_positive():
    params = SensingParams(0.1, 1.0, 1.0, 8)
    pilot = make_pilot(params, 2)
    assert log_likelihood_ratio(params, pilot, _obs(100 * pilot.samples)) > 0


@given(arrays(np.float64, 10, elements=st.floats(-10, 10)), st.floats(0.0, 0.9),
       st.floats(0.01, 10.0))
@settings(max_examples=200)
def test_llr_affine_in_np_statistic(y, theta, snr):
    params = SensingParams(theta, snr, 1.7, 10)
    pilot = make_pilot(params, 1)
    a, b = llr_affine_map(params)
    llr = log_likelihood_ratio(params, pilot, _obs(y))
    mapped = a * params.n_samples * stat_np(params, pilot, _obs(y)).value + b
    assert llr == pytest.approx(mapped, rel=1e-9, abs=1e-9)


def test_decide_examples():
    assert decide(Statistic(2.0, DetectorKind.ENERGY), 1.0) is Hypothesis.H1
    assert decide(Statistic(0.0, DetectorKind.ENERGY), 1.0) is Hypothesis.H0
    assert decide(Statistic(1.0, DetectorKind.ENERGY), 1.0) is Hypothesis.H0


def test_statistic_rejects_nan():
    with pytest.raises(ValueError):
        Statistic(float("nan"), DetectorKind.ENERGY)


@pytest.mark.parametrize("detector", list(DetectorKind))
@pytest.mark.parametrize("hypothesis", list(Hypothesis))
def test_pilot_sign_pattern_invariance(detector, hypothesis):
    params = SensingParams(0.1, 0.31623, 1.0, 100)
    trials = 100_000
    # same noise streams, different pilot sign patterns
    a = simulate_statistic(params, detector, hypothesis, trials, master_seed=0, pilot_seed=1)
    b = simulate_statistic(params, detector, hypothesis, trials, master_seed=0, pilot_seed=2)
    se_mean = math.sqrt(a.var() / trials + b.var() / trials)
    assert abs(a.mean() - b.mean()) < 3 * se_mean
    # sample variance SE ~ var * sqrt(2 / n) for near-Gaussian statistics
    se_var = math.sqrt(2.0 / trials) * math.hypot(a.var(), b.var())
    assert abs(a.var() - b.var()) < 3 * se_var
