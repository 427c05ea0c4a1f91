"""Pilot-aided Neyman-Pearson spectrum sensing.

Detectors, closed-form error probabilities under the Gaussian approximation,
and a deterministic Monte Carlo engine to check them.
"""
from ._backend import ACTIVE as BACKEND
from .analytic import (AnalyticMode, GaussianSpec, PerformancePoint, false_alarm_probability,
                       miss_detection_probability, performance_point, pmd_at_pfa, q_func, q_inv,
                       statistic_distribution, threshold_for_pfa)
from .detectors import (DetectorKind, Statistic, decide, log_likelihood_ratio, stat_energy,
                        stat_np, stat_pilot)
from .errors import DomainError, InfeasibleError
from .experiments import (CrocSpec, CurveRow, CurveTable, MonteCarloSettings, SweepSpec,
                          min_samples_for_targets, run_croc, run_pmd_vs_snr)
from .model import (Hypothesis, ObservationBlock, PilotSequence, SensingParams, derive_params,
                    make_pilot, synthesize_block, theta_from_pilot_offset_db)
from .montecarlo import (EmpiricalEstimate, MomentEstimate, TrialPlan, estimate_error_rates,
                         estimate_statistic_moments, wilson_interval)

__version__ = "0.1.0"
