"""Problem parameters, pilot sequences and observation synthesis.

Real-valued baseband model. Under H0 every received sample is white
Gaussian noise of variance ``noise_variance``; under H1 it is

    y_i = sqrt(theta) * x_p[i] + sqrt(1 - theta) * x_d[i] + n_i

with a known pilot ``x_p`` of per-sample power ``P`` and a data-carrying
component ``x_d ~ N(0, P)`` independent of the noise. ``P`` is fixed by the
SNR: ``P = snr * noise_variance``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import _rng
from .errors import DomainError


class Hypothesis(enum.Enum):
    H0 = "H0"  # noise only
    H1 = "H1"  # pilot + data + noise


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(ratio: float) -> float:
    return 10.0 * math.log10(ratio)


class DerivedQuantities(NamedTuple):
    power: float          # P
    data_power: float     # (1 - theta) * P
    pilot_ratio: float    # theta / (1 - theta)
    data_snr: float       # (1 - theta) * snr


@dataclass(frozen=True)
class SensingParams:
    """One detection problem instance.

    Attributes:
        theta: Fraction of the transmit power carried by the pilot, in [0, 1).
        snr: Linear SNR ``P / noise_variance``.
        noise_variance: Noise power. Probabilities depend only on ``snr``,
            so this only fixes units.
        n_samples: Number of IID samples per sensing block.
    """

    theta: float
    snr: float
    noise_variance: float = 1.0
    n_samples: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.theta) and 0.0 <= self.theta):
            raise DomainError(f"theta must be >= 0 (got {self.theta})")
        if not self.theta < 1.0:
            raise DomainError(f"theta must be < 1 (got {self.theta})")
        if not (math.isfinite(self.snr) and self.snr > 0.0):
            raise DomainError(f"snr must be > 0 (got {self.snr})")
        if not (math.isfinite(self.noise_variance) and self.noise_variance > 0.0):
            raise DomainError(f"noise_variance must be > 0 (got {self.noise_variance})")
        if isinstance(self.n_samples, bool) or int(self.n_samples) != self.n_samples:
            raise DomainError(f"n_samples must be an integer (got {self.n_samples})")
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be >= 1 (got {self.n_samples})")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @classmethod
    def from_db(cls, theta: float, snr_db: float, noise_variance: float = 1.0,
                n_samples: int = 100) -> "SensingParams":
        return cls(theta, db_to_linear(snr_db), noise_variance, n_samples)

    def with_(self, **changes) -> "SensingParams":
        return replace(self, **changes)

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)

    @property
    def power(self) -> float:
        return self.snr * self.noise_variance

    @property
    def data_power(self) -> float:
        return (1.0 - self.theta) * self.power

    @property
    def pilot_ratio(self) -> float:
        return self.theta / (1.0 - self.theta)

    @property
    def data_snr(self) -> float:
        return (1.0 - self.theta) * self.snr


def derive_params(params: SensingParams) -> DerivedQuantities:
    return DerivedQuantities(params.power, params.data_power,
                             params.pilot_ratio, params.data_snr)


def theta_from_pilot_offset_db(offset_db: float) -> float:
    """Pilot power fraction when the pilot sits ``offset_db`` below the data.

    Solves ``(1 - theta) / theta = 10**(offset_db / 10)``.
    """
    if not math.isfinite(offset_db):
        raise DomainError(f"offset_db must be finite (got {offset_db})")
    return 1.0 / (1.0 + db_to_linear(offset_db))


@dataclass(frozen=True, eq=False)
class PilotSequence:
    samples: np.ndarray
    power: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class ObservationBlock:
    samples: np.ndarray
    truth: Hypothesis | None = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.shape[0]


def make_pilot(params: SensingParams, pilot_seed: int = 0) -> PilotSequence:
    """Binary +/-sqrt(P) pilot whose sign pattern is fixed by ``pilot_seed``."""
    amplitude = math.sqrt(params.power)
    signs = _rng.sign_pattern(pilot_seed, params.n_samples)
    return PilotSequence(amplitude * signs, params.power)


def synthesize_block(params: SensingParams, pilot: PilotSequence, truth: Hypothesis,
                     rng) -> ObservationBlock:
    """Draw one block of ``n_samples`` received samples under ``truth``.

    ``rng`` is anything with a ``standard_normal(size)`` method: a
    :class:`numpy.random.Generator` or a :class:`~pilotsense._rng.CounterStream`.
    Noise is drawn first, then (under H1) the data-carrying signal.
    """
    n = params.n_samples
    if len(pilot) != n:
        raise ValueError(f"pilot has {len(pilot)} samples, expected {n}")
    noise = rng.standard_normal(n)
    if truth is Hypothesis.H0:
        y = math.sqrt(params.noise_variance) * noise
    else:
        data = rng.standard_normal(n)
        y = (math.sqrt(params.theta) * pilot.samples
             + math.sqrt(params.data_power) * data
             + math.sqrt(params.noise_variance) * noise)
    return ObservationBlock(y, truth)
