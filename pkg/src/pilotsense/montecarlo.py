"""Deterministic Monte Carlo estimation of error rates and statistic moments.

Trial ``i`` under hypothesis ``h`` draws all of its randomness from a stream
keyed by ``(master_seed, h, i)`` (see :mod:`pilotsense._rng`), so a run is a
pure function of its inputs: splitting it across any number of workers, or
running chunks in any order, yields bit-identical per-trial statistics.
Aggregation uses integer counts and exactly rounded sums (``math.fsum``).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend, _rng
from .analytic import q_inv
from .detectors import DetectorKind, combine_components
from .errors import DomainError
from .model import Hypothesis, PilotSequence, SensingParams, make_pilot

CHUNK_SIZE = 8192

_TAGS = {Hypothesis.H0: _rng.TAG_H0, Hypothesis.H1: _rng.TAG_H1}


@dataclass(frozen=True)
class TrialPlan:
    params: SensingParams
    detector: DetectorKind
    threshold: float
    trials_h0: int
    trials_h1: int
    master_seed: int = 0
    pilot_seed: int = 0


@dataclass(frozen=True)
class EmpiricalEstimate:
    successes: int
    trials: int
    proportion: float
    ci_low: float
    ci_high: float
    confidence: float = 0.95

    @classmethod
    def from_counts(cls, successes: int, trials: int,
                    confidence: float = 0.95) -> "EmpiricalEstimate":
        low, high = wilson_interval(successes, trials, confidence)
        return cls(int(successes), int(trials), successes / trials, low, high, confidence)


class ErrorRates(NamedTuple):
    p_fa: EmpiricalEstimate
    p_md: EmpiricalEstimate


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean and unbiased variance of a raw statistic.

    ``se_variance`` uses the large-sample formula
    ``sqrt((m4 - (n - 3) / (n - 1) * s2**2) / n)`` with ``m4`` the fourth
    central sample moment.
    """

    mean: float
    variance: float
    se_mean: float
    se_variance: float
    trials: int

    def scaled(self, factor: float) -> "MomentEstimate":
        """Moments of ``factor * statistic``."""
        return MomentEstimate(factor * self.mean, factor ** 2 * self.variance,
                              abs(factor) * self.se_mean, factor ** 2 * self.se_variance,
                              self.trials)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1 (got {trials})")
    if not 0 <= successes <= trials:
        raise DomainError(f"successes must lie in [0, trials] (got {successes}/{trials})")
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1) (got {confidence})")
    z = q_inv((1.0 - confidence) / 2.0)
    n = trials
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == trials else min(1.0, max(p, center + half))
    return low, high


def simulate_components(params: SensingParams, hypothesis: Hypothesis, trials: int,
                        master_seed: int = 0, pilot_seed: int = 0, *,
                        pilot: PilotSequence | None = None, workers: int = 1,
                        chunk_size: int | None = None,
                        backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial energy ``mean(y**2)`` and pilot correlation ``mean(x*y)``.

    Every detector statistic is a fixed combination of these two arrays
    (see :func:`pilotsense.detectors.combine_components`).
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1 (got {trials})")
    chunk_size = CHUNK_SIZE if chunk_size is None else chunk_size
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1 (got {chunk_size})")
    if pilot is None:
        pilot = make_pilot(params, pilot_seed)
    kernel = _backend.get_kernel(backend)
    key0 = _rng.base_key(master_seed, _TAGS[hypothesis])
    x = np.ascontiguousarray(pilot.samples, dtype=np.float64)
    h1 = hypothesis is Hypothesis.H1
    sqrt_theta = math.sqrt(params.theta)
    data_std = math.sqrt(params.data_power)
    noise_std = math.sqrt(params.noise_variance)
    energy = np.empty(trials)
    corr = np.empty(trials)

    def run(start: int) -> None:
        stop = min(start + chunk_size, trials)
        kernel(x, sqrt_theta, data_std, noise_std, h1, key0, start, stop,
               energy[start:stop], corr[start:stop])

    starts = range(0, trials, chunk_size)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for start in starts:
            run(start)
    return energy, corr


def simulate_statistic(params: SensingParams, detector: DetectorKind, hypothesis: Hypothesis,
                       trials: int, master_seed: int = 0, pilot_seed: int = 0,
                       **kwargs) -> np.ndarray:
    energy, corr = simulate_components(params, hypothesis, trials, master_seed, pilot_seed,
                                       **kwargs)
    return combine_components(detector, params, energy, corr)


def count_h1_decisions(values: np.ndarray, threshold: float) -> int:
    """Number of blocks declared H1 (strictly above threshold)."""
    return int(np.count_nonzero(values > threshold))


def estimate_error_rates(plan: TrialPlan, confidence: float = 0.95, **kwargs) -> ErrorRates:
    if plan.trials_h0 < 1 or plan.trials_h1 < 1:
        raise DomainError("trials_h0 and trials_h1 must be >= 1")
    h0 = simulate_statistic(plan.params, plan.detector, Hypothesis.H0, plan.trials_h0,
                            plan.master_seed, plan.pilot_seed, **kwargs)
    h1 = simulate_statistic(plan.params, plan.detector, Hypothesis.H1, plan.trials_h1,
                            plan.master_seed, plan.pilot_seed, **kwargs)
    false_alarms = count_h1_decisions(h0, plan.threshold)
    misses = plan.trials_h1 - count_h1_decisions(h1, plan.threshold)
    return ErrorRates(
        EmpiricalEstimate.from_counts(false_alarms, plan.trials_h0, confidence),
        EmpiricalEstimate.from_counts(misses, plan.trials_h1, confidence),
    )


def sample_moments(values: np.ndarray) -> MomentEstimate:
    n = values.shape[0]
    if n < 2:
        raise DomainError(f"need at least 2 trials for moments (got {n})")
    mean = math.fsum(values) / n
    dev = values - mean
    sq = dev * dev
    variance = math.fsum(sq) / (n - 1)
    m4 = math.fsum(sq * sq) / n
    se_var = math.sqrt(max(m4 - (n - 3) / (n - 1) * variance ** 2, 0.0) / n)
    return MomentEstimate(mean, variance, math.sqrt(variance / n), se_var, n)


def estimate_statistic_moments(params: SensingParams, detector: DetectorKind,
                               hypothesis: Hypothesis, trials: int, master_seed: int = 0,
                               pilot_seed: int = 0, **kwargs) -> MomentEstimate:
    if trials < 2:
        raise DomainError(f"trials must be >= 2 (got {trials})")
    values = simulate_statistic(params, detector, hypothesis, trials, master_seed,
                                pilot_seed, **kwargs)
    return sample_moments(values)
