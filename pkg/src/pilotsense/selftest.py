"""Built-in verification report used by ``pilotsense selftest``."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .analytic import (AnalyticMode, pmd_at_pfa, q_inv, statistic_distribution,
                       threshold_for_pfa)
from .detectors import DetectorKind
from .experiments import min_samples_for_targets
from .model import Hypothesis, SensingParams, db_to_linear
from .montecarlo import TrialPlan, estimate_error_rates, wilson_interval

NP = DetectorKind.NEYMAN_PEARSON
PILOT = DetectorKind.CONVENTIONAL_PILOT
PAPER = AnalyticMode.PAPER
EXACT = AnalyticMode.EXACT

SMOKE_TRIALS = 20_000


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    actual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.actual) and abs(self.actual - self.expected) <= self.tolerance


def _params(snr_db: float, n: int = 100) -> SensingParams:
    return SensingParams(0.1, db_to_linear(snr_db), 1.0, n)


def analytic_checks() -> list[Check]:
    p5, p15 = _params(-5), _params(-15)
    gamma = db_to_linear(-5)
    return [
        Check("q_inv_0.1", 1.28155, q_inv(0.1), 1e-4),
        Check("np_h0_variance", 356.16, statistic_distribution(NP, Hypothesis.H0, p5, PAPER).variance, 0.01),
        Check("np_paper_h1_mean", 119.76, statistic_distribution(NP, Hypothesis.H1, p5, PAPER).mean, 0.01),
        Check("pilot_threshold_pfa_0.1", 0.07207, threshold_for_pfa(PILOT, p5, 0.1, PAPER), 1e-4),
        Check("np_paper_pmd_-5dB", 0.098, pmd_at_pfa(NP, p5, 0.1, PAPER), 0.002),
        Check("np_exact_pmd_-5dB", 0.124, pmd_at_pfa(NP, p5, 0.1, EXACT), 0.002),
        Check("pilot_paper_pmd_-5dB", 0.310, pmd_at_pfa(PILOT, p5, 0.1, PAPER), 0.002),
        Check("pilot_paper_pmd_-15dB", 0.764, pmd_at_pfa(PILOT, p15, 0.1, PAPER), 0.002),
        Check("np_exact_pmd_-15dB", 0.742, pmd_at_pfa(NP, p15, 0.1, EXACT), 0.002),
        Check("min_samples_pilot_paper", 208,
              min_samples_for_targets(PILOT, 0.1, gamma, 1.0, 0.1, 0.1, PAPER), 0),
        Check("min_samples_np_paper", 100,
              min_samples_for_targets(NP, 0.1, gamma, 1.0, 0.1, 0.1, PAPER), 1),
        Check("wilson_50_of_100_low", 0.4038, wilson_interval(50, 100, 0.95)[0], 0.001),
    ]


def montecarlo_checks(trials: int = SMOKE_TRIALS, seed: int = 12345) -> list[Check]:
    params = _params(-5)
    checks = []
    for detector, mode, name in ((PILOT, PAPER, "pilot"), (NP, EXACT, "np")):
        threshold = threshold_for_pfa(detector, params, 0.1, mode)
        rates = estimate_error_rates(TrialPlan(params, detector, threshold, trials, trials, seed))
        se_fa = math.sqrt(0.1 * 0.9 / trials)
        expected_md = pmd_at_pfa(detector, params, 0.1, EXACT)
        se_md = math.sqrt(expected_md * (1 - expected_md) / trials)
        # NP slack of 0.01 covers the Gaussian-shape error at N = 100
        slack = 0.01 if detector is NP else 0.0
        checks.append(Check(f"mc_{name}_pfa_smoke", 0.1, rates.p_fa.proportion,
                            4 * se_fa + slack))
        checks.append(Check(f"mc_{name}_pmd_smoke", expected_md, rates.p_md.proportion,
                            4 * se_md + slack))
    return checks


def run_selftest(out=None) -> bool:
    out = out or sys.stdout
    checks = analytic_checks() + montecarlo_checks()
    width = max(len(c.name) for c in checks)
    for c in checks:
        verdict = "PASS" if c.passed else "FAIL"
        print(f"{c.name:<{width}}  expected={c.expected:<10.6g} actual={c.actual:<12.6g} "
              f"tol={c.tolerance:<8.3g} {verdict}", file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=out)
    return failed == 0
