import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pilotsense import (DomainError, Hypothesis, SensingParams, derive_params, make_pilot,
                        synthesize_block, theta_from_pilot_offset_db)
from pilotsense._rng import CounterStream


def test_derive_params_paper_point():
    d = derive_params(SensingParams(0.1, 0.31623, 1.0, 100))
    assert d.power == pytest.approx(0.31623, abs=1e-12)
    assert d.data_power == pytest.approx(0.284607, abs=1e-6)
    assert d.pilot_ratio == pytest.approx(0.111111, abs=1e-6)
    assert d.data_snr == pytest.approx(0.284607, abs=1e-6)


def test_derive_params_zero_pilot():
    d = derive_params(SensingParams(0.0, 2.5, 3.0, 10))
    assert d.pilot_ratio == 0.0
    assert d.data_power == d.power == 7.5
    assert d.data_snr == 2.5


def test_symmetric_split_has_unit_ratio():
    assert derive_params(SensingParams(0.5, 1.0)).pilot_ratio == 1.0


@pytest.mark.parametrize("kwargs, rule", [
    (dict(theta=1.0, snr=1.0), "theta must be < 1"),
    (dict(theta=1.5, snr=1.0), "theta must be < 1"),
    (dict(theta=-0.1, snr=1.0), "theta must be >= 0"),
    (dict(theta=0.1, snr=0.0), "snr must be > 0"),
    (dict(theta=0.1, snr=1.0, noise_variance=-1.0), "noise_variance must be > 0"),
    (dict(theta=0.1, snr=1.0, n_samples=0), "n_samples must be >= 1"),
    (dict(theta=0.1, snr=1.0, n_samples=2.5), "n_samples must be an integer"),
])
def test_params_rejects_invalid(kwargs, rule):
    with pytest.raises(DomainError, match=rule):
        SensingParams(**kwargs)


def test_theta_from_offset():
    assert theta_from_pilot_offset_db(0.0) == 0.5
    # (1 - theta) / theta = 10**1.1
    assert theta_from_pilot_offset_db(11.0) == pytest.approx(0.0735876, abs=1e-7)
    assert theta_from_pilot_offset_db(100.0) < 1e-9


@given(st.floats(-60, 60))
def test_theta_from_offset_inverts(offset_db):
    theta = theta_from_pilot_offset_db(offset_db)
    assert 10 * math.log10((1 - theta) / theta) == pytest.approx(offset_db, abs=1e-9)


def test_pilot_binary_with_power_p():
    pilot = make_pilot(SensingParams(0.1, 1.0, 1.0, 4), pilot_seed=3)
    assert set(pilot.samples.tolist()) <= {-1.0, 1.0}
    pilot = make_pilot(SensingParams(0.1, 4.0, 1.0, 2), pilot_seed=3)
    assert set(pilot.samples.tolist()) <= {-2.0, 2.0}


@given(st.integers(1, 500), st.floats(1e-3, 1e3), st.integers(-2**70, 2**70))
def test_pilot_power_exact(n, snr, seed):
    params = SensingParams(0.2, snr, 1.0, n)
    pilot = make_pilot(params, seed)
    assert len(pilot) == n
    assert np.mean(pilot.samples ** 2) == pytest.approx(params.power, rel=1e-14)


def test_pilot_deterministic_and_seed_dependent():
    params = SensingParams(0.1, 1.0, 1.0, 64)
    a, b = make_pilot(params, 7), make_pilot(params, 7)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, make_pilot(params, 8).samples)
    assert not a.samples.flags.writeable


def test_synthesize_rejects_wrong_pilot_length():
    params = SensingParams(0.1, 1.0, 1.0, 10)
    pilot = make_pilot(params.with_(n_samples=9))
    with pytest.raises(ValueError):
        synthesize_block(params, pilot, Hypothesis.H1, np.random.default_rng(0))


def _pooled(params, truth, blocks, seed):
    pilot = make_pilot(params, 1)
    rng = np.random.default_rng(seed)
    y = np.array([synthesize_block(params, pilot, truth, rng).samples for _ in range(blocks)])
    return pilot, y


def test_h0_synthesis_moments():
    params = SensingParams(0.1, 0.5, 2.0, 100)
    _, y = _pooled(params, Hypothesis.H0, 100_000, 11)
    sigma = math.sqrt(params.noise_variance)
    assert abs(y.mean()) < 4 * sigma / math.sqrt(y.size)
    assert y.var() == pytest.approx(params.noise_variance, rel=0.01)


def test_h1_synthesis_moments():
    params = SensingParams(0.1, 0.5, 2.0, 100)
    pilot, y = _pooled(params, Hypothesis.H1, 100_000, 12)
    expected_mean = math.sqrt(params.theta) * pilot.samples
    s2 = params.data_power + params.noise_variance
    se = math.sqrt(s2 / y.shape[0])
    assert np.max(np.abs(y.mean(axis=0) - expected_mean)) < 4.5 * se
    assert (y - expected_mean).var() == pytest.approx(s2, rel=0.01)


def test_zero_theta_h1_is_energy_model():
    params = SensingParams(0.0, 0.8, 1.0, 50)
    _, y = _pooled(params, Hypothesis.H1, 20_000, 13)
    assert abs(y.mean()) < 4 * math.sqrt((params.power + 1.0) / y.size)
    assert y.var() == pytest.approx(params.power + 1.0, rel=0.01)


def test_counter_stream_synthesis_deterministic():
    params = SensingParams(0.3, 1.0, 1.0, 33)
    pilot = make_pilot(params, 2)
    a = synthesize_block(params, pilot, Hypothesis.H1, CounterStream.for_trial(5, 1, 9))
    b = synthesize_block(params, pilot, Hypothesis.H1, CounterStream.for_trial(5, 1, 9))
    assert np.array_equal(a.samples, b.samples)
    assert a.truth is Hypothesis.H1
