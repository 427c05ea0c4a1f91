"""Closed-form detection performance under the large-N Gaussian approximation.

Two analytic modes are available:

``AnalyticMode.PAPER``
    The published closed forms, transcribed as printed. The NP miss
    probability keeps the ``+ 2*theta`` term in its denominator, the H1
    variance of the NP statistic omits the energy/pilot covariance, and the
    conventional correlator's H1 variance ignores the data-carrying signal.
    The published H1 variance of the NP statistic (returned by
    :func:`statistic_distribution`) normalizes to a ``2*phi`` term instead,
    so the two PAPER-mode views differ slightly by construction.

``AnalyticMode.EXACT``
    First and second moments re-derived from the signal model for every
    detector, including the covariance between ``y**2`` and ``x*y`` under H1
    and the data-signal variance seen by the correlator. The Gaussian shape
    is still an approximation for statistics containing ``y**2``.

Threshold convention: the raw threshold ``lam`` on the NP or energy
statistic is normalized as ``lam / noise_variance``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .detectors import DetectorKind, pilot_weight
from .errors import DomainError
from .model import Hypothesis, SensingParams


class AnalyticMode(enum.Enum):
    PAPER = "paper"
    EXACT = "exact"


@dataclass(frozen=True)
class GaussianSpec:
    """``normalization * raw_statistic ~ N(mean, variance)``."""

    mean: float
    variance: float
    normalization: float = 1.0

    def __post_init__(self):
        if not self.variance > 0.0:
            raise ValueError(f"variance must be > 0 (got {self.variance})")
        if not self.normalization > 0.0:
            raise ValueError(f"normalization must be > 0 (got {self.normalization})")

    def standardize(self, raw):
        return (self.normalization * raw - self.mean) / math.sqrt(self.variance)

    def raw_quantile_from_z(self, z: float) -> float:
        """Raw statistic value sitting ``z`` standard deviations above the mean."""
        return (self.mean + math.sqrt(self.variance) * z) / self.normalization


@dataclass(frozen=True)
class PerformancePoint:
    detector: DetectorKind
    mode: AnalyticMode
    threshold: float
    p_fa: float
    p_md: float


def q_func(x):
    """Standard Gaussian upper-tail probability ``Q(x) = P(Z > x)``."""
    out = special.ndtr(-np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def q_inv(p):
    """Inverse of :func:`q_func` on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"probability must lie in (0, 1) (got {p})")
    out = -special.ndtri(arr)
    return float(out) if np.ndim(out) == 0 else out


def _check_probability(p: float, name: str = "target_pfa") -> None:
    if not 0.0 < p < 1.0:
        raise DomainError(f"{name} must lie in (0, 1) (got {p})")


def _moments_per_sample(energy_weight: float, pilot_weight_: float, mean_scale: float,
                        variance: float, power: float) -> tuple[float, float]:
    """Mean and variance of ``a*y**2 + b*x*y`` for ``y ~ N(c*x, s2)``, ``x**2 = P``.

    Uses ``Var(y**2) = 2 s2**2 + 4 mu**2 s2`` and ``Cov(y**2, y) = 2 mu s2``.
    """
    a, b, c, s2 = energy_weight, pilot_weight_, mean_scale, variance
    mu_sq = c * c * power
    mean = a * (mu_sq + s2) + b * c * power
    var = (a * a * (2.0 * s2 * s2 + 4.0 * mu_sq * s2)
           + b * b * power * s2
           + 4.0 * a * b * c * power * s2)
    return mean, var


def _exact_spec(energy_weight: float, pilot_weight_: float, hypothesis: Hypothesis,
                params: SensingParams, normalization: float) -> GaussianSpec:
    n = params.n_samples
    if hypothesis is Hypothesis.H0:
        mean_scale, s2 = 0.0, params.noise_variance
    else:
        mean_scale = math.sqrt(params.theta)
        s2 = params.data_power + params.noise_variance
    mean, var = _moments_per_sample(energy_weight, pilot_weight_, mean_scale, s2, params.power)
    return GaussianSpec(normalization * mean, normalization ** 2 * var / n, normalization)


def _np_paper_spec(hypothesis: Hypothesis, params: SensingParams) -> GaussianSpec:
    n, sigma2 = params.n_samples, params.noise_variance
    p, p_data, phi, theta = params.power, params.data_power, params.pilot_ratio, params.theta
    if hypothesis is Hypothesis.H0:
        return GaussianSpec(n, (2.0 * n / p_data) * (p_data + 2.0 * phi * sigma2), n / sigma2)
    s2 = p_data + sigma2
    m = (n * p + n * (1.0 + 2.0 * phi) * sigma2) / s2
    v = (2.0 * n * ((1.0 - theta ** 2) * p ** 2 + (p_data + 2.0 * phi * sigma2) * sigma2)
         / (p_data * s2))
    return GaussianSpec(m, v, n / s2)


def _pilot_paper_spec(hypothesis: Hypothesis, params: SensingParams) -> GaussianSpec:
    var = params.power * params.noise_variance / params.n_samples
    if hypothesis is Hypothesis.H0:
        return GaussianSpec(0.0, var)
    return GaussianSpec(math.sqrt(params.theta) * params.power, var)


def statistic_distribution(detector: DetectorKind, hypothesis: Hypothesis,
                           params: SensingParams, mode: AnalyticMode) -> GaussianSpec:
    """Gaussian approximation to a detector statistic under one hypothesis.

    NP and energy statistics are normalized by ``N / sigma^2`` under H0 and
    by ``N / (P_data + sigma^2)`` under H1 (for energy, ``P_data = P``). The
    pilot correlator is not normalized.
    """
    if mode is AnalyticMode.PAPER:
        if detector is DetectorKind.CONVENTIONAL_PILOT:
            return _pilot_paper_spec(hypothesis, params)
        if detector is DetectorKind.ENERGY:
            params = params.with_(theta=0.0)
        return _np_paper_spec(hypothesis, params)

    n, sigma2 = params.n_samples, params.noise_variance
    if detector is DetectorKind.CONVENTIONAL_PILOT:
        return _exact_spec(0.0, 1.0, hypothesis, params, 1.0)
    if detector is DetectorKind.ENERGY:
        h1_scale = params.power + sigma2
        weight = 0.0
    else:
        h1_scale = params.data_power + sigma2
        weight = pilot_weight(params)
    norm = n / sigma2 if hypothesis is Hypothesis.H0 else n / h1_scale
    return _exact_spec(1.0, weight, hypothesis, params, norm)


def _np_paper_pfa(params: SensingParams, threshold: float) -> float:
    n, phi = params.n_samples, params.pilot_ratio
    lam = threshold / params.noise_variance
    return q_func(math.sqrt(n / 2.0) * (lam - 1.0)
                  / math.sqrt(1.0 + 2.0 * phi / params.data_snr))


def _np_paper_pmd(params: SensingParams, threshold: float) -> float:
    # as printed: the last denominator term is 2*theta
    n, theta, phi = params.n_samples, params.theta, params.pilot_ratio
    gamma, gamma_d = params.snr, params.data_snr
    lam = threshold / params.noise_variance
    num = math.sqrt(n / 2.0) * (lam - gamma - (1.0 + 2.0 * phi))
    den = math.sqrt((1.0 + 1.0 / gamma_d)
                    * ((1.0 - theta ** 2) * gamma ** 2 + gamma_d + 2.0 * theta))
    return q_func(-num / den)


def false_alarm_probability(detector: DetectorKind, params: SensingParams, threshold: float,
                            mode: AnalyticMode) -> float:
    if mode is AnalyticMode.PAPER and detector is not DetectorKind.CONVENTIONAL_PILOT:
        if detector is DetectorKind.ENERGY:
            params = params.with_(theta=0.0)
        return _np_paper_pfa(params, threshold)
    spec = statistic_distribution(detector, Hypothesis.H0, params, mode)
    return q_func(spec.standardize(threshold))


def miss_detection_probability(detector: DetectorKind, params: SensingParams,
                               threshold: float, mode: AnalyticMode) -> float:
    if mode is AnalyticMode.PAPER and detector is not DetectorKind.CONVENTIONAL_PILOT:
        if detector is DetectorKind.ENERGY:
            params = params.with_(theta=0.0)
        return _np_paper_pmd(params, threshold)
    spec = statistic_distribution(detector, Hypothesis.H1, params, mode)
    return q_func(-spec.standardize(threshold))


def threshold_for_pfa(detector: DetectorKind, params: SensingParams, target_pfa: float,
                      mode: AnalyticMode) -> float:
    """Raw threshold giving false-alarm probability ``target_pfa``."""
    _check_probability(target_pfa)
    spec = statistic_distribution(detector, Hypothesis.H0, params, mode)
    return spec.raw_quantile_from_z(q_inv(target_pfa))


def pmd_at_pfa(detector: DetectorKind, params: SensingParams, target_pfa: float,
               mode: AnalyticMode) -> float:
    threshold = threshold_for_pfa(detector, params, target_pfa, mode)
    return miss_detection_probability(detector, params, threshold, mode)


def performance_point(detector: DetectorKind, params: SensingParams, target_pfa: float,
                      mode: AnalyticMode) -> PerformancePoint:
    threshold = threshold_for_pfa(detector, params, target_pfa, mode)
    return PerformancePoint(
        detector, mode, threshold,
        false_alarm_probability(detector, params, threshold, mode),
        miss_detection_probability(detector, params, threshold, mode),
    )
