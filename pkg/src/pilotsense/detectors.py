"""Test statistics and the exact log-likelihood ratio.

Statistics are returned in raw units; threshold normalization lives in
:mod:`pilotsense.analytic`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import Hypothesis, ObservationBlock, PilotSequence, SensingParams


class DetectorKind(enum.Enum):
    CONVENTIONAL_PILOT = "pilot"
    NEYMAN_PEARSON = "np"
    ENERGY = "energy"


@dataclass(frozen=True)
class Statistic:
    value: float
    kind: DetectorKind

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"statistic value must be finite (got {self.value})")


def _check_lengths(pilot: PilotSequence, obs: ObservationBlock) -> None:
    if len(pilot) != len(obs):
        raise ValueError(f"pilot length {len(pilot)} != observation length {len(obs)}")


def pilot_weight(params: SensingParams) -> float:
    """Weight ``2 sqrt(theta) sigma^2 / P_data`` of the pilot term in the NP statistic."""
    return 2.0 * math.sqrt(params.theta) * params.noise_variance / params.data_power


def stat_pilot(pilot: PilotSequence, obs: ObservationBlock) -> Statistic:
    """Conventional correlator ``mean(x_p * y)``."""
    _check_lengths(pilot, obs)
    return Statistic(float(np.mean(pilot.samples * obs.samples)),
                     DetectorKind.CONVENTIONAL_PILOT)


def stat_energy(obs: ObservationBlock) -> Statistic:
    """Average received energy ``mean(y**2)``."""
    return Statistic(float(np.mean(obs.samples * obs.samples)), DetectorKind.ENERGY)


def stat_np(params: SensingParams, pilot: PilotSequence, obs: ObservationBlock) -> Statistic:
    """Neyman-Pearson statistic: energy plus weighted pilot correlation.

    Computed as ``stat_energy + pilot_weight * stat_pilot`` so that the
    statistic coincides bit-for-bit with the energy detector when
    ``theta == 0`` and matches the Monte Carlo kernel's composition.
    """
    _check_lengths(pilot, obs)
    energy = stat_energy(obs).value
    corr = stat_pilot(pilot, obs).value
    return Statistic(energy + pilot_weight(params) * corr, DetectorKind.NEYMAN_PEARSON)


def statistic(kind: DetectorKind, params: SensingParams, pilot: PilotSequence,
              obs: ObservationBlock) -> Statistic:
    if kind is DetectorKind.CONVENTIONAL_PILOT:
        return stat_pilot(pilot, obs)
    if kind is DetectorKind.NEYMAN_PEARSON:
        return stat_np(params, pilot, obs)
    return stat_energy(obs)


def combine_components(kind: DetectorKind, params: SensingParams, energy, corr):
    """Detector statistic from per-block energy and pilot-correlation values."""
    if kind is DetectorKind.CONVENTIONAL_PILOT:
        return corr
    if kind is DetectorKind.ENERGY:
        return energy
    return energy + pilot_weight(params) * corr


def log_likelihood_ratio(params: SensingParams, pilot: PilotSequence,
                         obs: ObservationBlock) -> float:
    """``sum_i ln f(y_i | H1) - ln f(y_i | H0)`` with the full Gaussian densities."""
    _check_lengths(pilot, obs)
    y = obs.samples
    var0 = params.noise_variance
    var1 = params.data_power + params.noise_variance
    mean1 = math.sqrt(params.theta) * pilot.samples
    log_f1 = -0.5 * np.log(2.0 * np.pi * var1) - (y - mean1) ** 2 / (2.0 * var1)
    log_f0 = -0.5 * np.log(2.0 * np.pi * var0) - y ** 2 / (2.0 * var0)
    return float(np.sum(log_f1 - log_f0))


def llr_affine_map(params: SensingParams) -> tuple[float, float]:
    """Coefficients ``(a, b)`` with ``LLR = a * N * stat_np + b``.

    Per sample ``a = P_data / (2 sigma^2 (P_data + sigma^2))``; ``b`` collects
    the pilot-mean energy and the log-variance ratio.
    """
    var0 = params.noise_variance
    var1 = params.data_power + var0
    n = params.n_samples
    a = params.data_power / (2.0 * var0 * var1)
    b = -n * params.theta * params.power / (2.0 * var1) - 0.5 * n * math.log(var1 / var0)
    return a, b


def decide(stat: Statistic | float, threshold: float) -> Hypothesis:
    """H1 iff the statistic strictly exceeds the threshold; ties go to H0."""
    value = stat.value if isinstance(stat, Statistic) else stat
    return Hypothesis.H1 if value > threshold else Hypothesis.H0
