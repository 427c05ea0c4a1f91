"""CROC curves, miss-probability-vs-SNR sweeps and sample-count searches."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .analytic import AnalyticMode, miss_detection_probability, pmd_at_pfa, threshold_for_pfa
from .detectors import DetectorKind, combine_components
from .errors import DomainError, InfeasibleError
from .model import Hypothesis, SensingParams, db_to_linear, linear_to_db, make_pilot
from .montecarlo import (EmpiricalEstimate, count_h1_decisions, simulate_components,
                         wilson_interval)

log = logging.getLogger(__name__)

DEFAULT_PFA_GRID = tuple(float(p) for p in np.logspace(-3, math.log10(0.5), 30))
DEFAULT_SNR_GRID_DB = tuple(float(s) for s in np.arange(-20, 1, 1))
DEFAULT_N_LIST = (100, 1000)
DEFAULT_PFA_TARGETS = (0.1, 0.001)

ALL_DETECTORS = tuple(DetectorKind)
ALL_MODES = tuple(AnalyticMode)
_DETECTOR_ORDER = {d: i for i, d in enumerate(DetectorKind)}
_MODE_ORDER = {m: i for i, m in enumerate(AnalyticMode)}


@dataclass(frozen=True)
class MonteCarloSettings:
    trials_h0: int
    trials_h1: int
    master_seed: int = 0
    pilot_seed: int = 0
    confidence: float = 0.95
    workers: int = 1

    def __post_init__(self):
        if self.trials_h0 < 1 or self.trials_h1 < 1:
            raise DomainError("Monte Carlo trial counts must be >= 1")


def _check_grid(values, name, lo=None, hi=None):
    if len(values) == 0:
        raise DomainError(f"{name} must be non-empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError(f"{name} must be strictly increasing")
    if lo is not None and any(not lo < v < hi for v in values):
        raise DomainError(f"{name} values must lie in ({lo}, {hi})")


@dataclass(frozen=True)
class CrocSpec:
    params: SensingParams
    detectors: tuple[DetectorKind, ...] = ALL_DETECTORS
    pfa_grid: tuple[float, ...] = DEFAULT_PFA_GRID
    modes: tuple[AnalyticMode, ...] = ALL_MODES
    montecarlo: MonteCarloSettings | None = None

    def __post_init__(self):
        _check_grid(self.pfa_grid, "pfa_grid", 0.0, 1.0)
        if not self.detectors or not self.modes:
            raise DomainError("detectors and modes must be non-empty")


@dataclass(frozen=True)
class SweepSpec:
    theta: float
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID_DB
    pfa_targets: tuple[float, ...] = DEFAULT_PFA_TARGETS
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    noise_variance: float = 1.0
    detectors: tuple[DetectorKind, ...] = ALL_DETECTORS
    modes: tuple[AnalyticMode, ...] = ALL_MODES
    montecarlo: MonteCarloSettings | None = None

    def __post_init__(self):
        _check_grid(self.snr_grid_db, "snr_grid_db")
        _check_grid(tuple(sorted(self.pfa_targets)), "pfa_targets", 0.0, 1.0)
        _check_grid(tuple(sorted(self.n_list)), "n_list")
        if not self.detectors or not self.modes:
            raise DomainError("detectors and modes must be non-empty")


@dataclass(frozen=True)
class CurveRow:
    detector: DetectorKind
    mode: AnalyticMode
    theta: float
    snr_db: float
    n_samples: int
    p_fa_target: float
    threshold: float
    p_md_analytic: float
    p_md_empirical: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    trials: int | None = None
    seed: int | None = None

    def sort_key(self):
        return (_DETECTOR_ORDER[self.detector], _MODE_ORDER[self.mode], self.snr_db,
                self.n_samples, self.p_fa_target)


COLUMNS = tuple(f.name for f in fields(CurveRow))


@dataclass
class CurveTable:
    rows: list[CurveRow] = field(default_factory=list)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=CurveRow.sort_key)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def select(self, **criteria) -> list[CurveRow]:
        return [r for r in self.rows
                if all(getattr(r, k) == v for k, v in criteria.items())]


def _snr_db(params: SensingParams) -> float:
    return round(linear_to_db(params.snr), 10)


class _Overlay:
    """Simulated statistics for one parameter set, reused across thresholds."""

    def __init__(self, params: SensingParams, mc: MonteCarloSettings):
        self.mc = mc
        self.params = params
        pilot = make_pilot(params, mc.pilot_seed)
        self._h1 = simulate_components(params, Hypothesis.H1, mc.trials_h1, mc.master_seed,
                                       pilot=pilot, workers=mc.workers)
        self._sorted = {}

    def misses(self, detector: DetectorKind, threshold: float) -> int:
        if detector not in self._sorted:
            self._sorted[detector] = np.sort(
                combine_components(detector, self.params, *self._h1))
        # blocks at or below the threshold are declared H0
        return int(np.searchsorted(self._sorted[detector], threshold, side="right"))

    def fill(self, row: CurveRow) -> CurveRow:
        misses = self.misses(row.detector, row.threshold)
        n = self.mc.trials_h1
        low, high = wilson_interval(misses, n, self.mc.confidence)
        return CurveRow(**{**row.__dict__, "p_md_empirical": misses / n, "ci_low": low,
                           "ci_high": high, "trials": n, "seed": self.mc.master_seed})


def _analytic_row(detector, mode, params, target) -> CurveRow:
    threshold = threshold_for_pfa(detector, params, target, mode)
    return CurveRow(detector, mode, params.theta, _snr_db(params), params.n_samples, target,
                    threshold, miss_detection_probability(detector, params, threshold, mode))


def run_croc(spec: CrocSpec) -> CurveTable:
    """Miss probability at each target false-alarm probability of the grid."""
    overlay = _Overlay(spec.params, spec.montecarlo) if spec.montecarlo else None
    rows = []
    for detector in spec.detectors:
        for mode in spec.modes:
            for target in spec.pfa_grid:
                row = _analytic_row(detector, mode, spec.params, target)
                rows.append(overlay.fill(row) if overlay else row)
    return CurveTable(rows)


def run_pmd_vs_snr(spec: SweepSpec) -> CurveTable:
    rows = []
    for n in spec.n_list:
        for snr_db in spec.snr_grid_db:
            params = SensingParams(spec.theta, db_to_linear(snr_db), spec.noise_variance, n)
            overlay = _Overlay(params, spec.montecarlo) if spec.montecarlo else None
            for detector in spec.detectors:
                for mode in spec.modes:
                    for target in spec.pfa_targets:
                        row = _analytic_row(detector, mode, params, target)
                        rows.append(overlay.fill(row) if overlay else row)
    return CurveTable(rows)


def run_simulation(params: SensingParams, detectors, modes, targets,
                   mc: MonteCarloSettings) -> tuple[CurveTable, dict]:
    """Calibrated thresholds checked against simulation under both hypotheses.

    Returns the curve table (empirical miss probabilities) and a mapping
    ``(detector, mode, target) -> EmpiricalEstimate`` of false-alarm rates.
    """
    pilot = make_pilot(params, mc.pilot_seed)
    h0 = simulate_components(params, Hypothesis.H0, mc.trials_h0, mc.master_seed,
                             pilot=pilot, workers=mc.workers)
    overlay = _Overlay(params, mc)
    rows, false_alarms = [], {}
    for detector in detectors:
        null_values = combine_components(detector, params, *h0)
        for mode in modes:
            for target in targets:
                row = _analytic_row(detector, mode, params, target)
                rows.append(overlay.fill(row))
                false_alarms[detector, mode, target] = EmpiricalEstimate.from_counts(
                    count_h1_decisions(null_values, row.threshold), mc.trials_h0, mc.confidence)
    return CurveTable(rows), false_alarms


def min_samples_for_targets(detector: DetectorKind, theta: float, snr: float,
                            noise_variance: float, target_pfa: float, target_pmd: float,
                            mode: AnalyticMode, cap: int = 10 ** 9) -> int:
    """Smallest block length meeting both error targets.

    Exponential bracketing followed by bisection; relies on the miss
    probability being non-increasing in the block length.
    """
    if not 0.0 < target_pmd < 1.0:
        raise DomainError(f"target_pmd must lie in (0, 1) (got {target_pmd})")
    if not 0.0 < target_pfa < 1.0:
        raise DomainError(f"target_pfa must lie in (0, 1) (got {target_pfa})")

    def meets(n: int) -> bool:
        params = SensingParams(theta, snr, noise_variance, n)
        return pmd_at_pfa(detector, params, target_pfa, mode) <= target_pmd

    if meets(1):
        return 1
    lo, hi = 1, 2
    while not meets(hi):
        if hi >= cap:
            raise InfeasibleError(
                f"no block length up to {cap} reaches P_MD <= {target_pmd} at P_FA = {target_pfa}")
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if meets(mid):
            hi = mid
        else:
            lo = mid
    return hi


def overlay_bracket_rate(table: CurveTable) -> float:
    """Fraction of simulated rows whose analytic miss probability lies in the CI.

    Rows outside their interval are logged at INFO level.
    """
    simulated = [r for r in table if r.p_md_empirical is not None]
    if not simulated:
        raise ValueError("table has no Monte Carlo rows")
    inside = 0
    for r in simulated:
        if r.ci_low <= r.p_md_analytic <= r.ci_high:
            inside += 1
        else:
            log.info("outside CI: %s/%s snr=%.1f dB N=%d pfa=%.4g analytic=%.5f ci=[%.5f, %.5f]",
                     r.detector.value, r.mode.value, r.snr_db, r.n_samples, r.p_fa_target,
                     r.p_md_analytic, r.ci_low, r.ci_high)
    return inside / len(simulated)
