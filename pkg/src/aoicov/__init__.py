"""Age-of-information metrics, coverage and energy-optimal power for a
retransmitting sensor, with a Monte-Carlo simulator to check them."""

from .aoi import (TimingMoments, ViolationQuery, average_aoi, timing_moments,
                  violation_prob, violation_probability,
                  violation_probability_monotonicity_witness)
from .channel import (Environment, InterfererClass, SystemParams, c1_alpha, dbm_to_mw,
                      mw_to_dbm, stp, stp_inverse, reference_params)
from .coverage import (CorrelationParams, correlation, estimation_error, eta_coverage_probability,
                       eta_threshold, max_coverage, max_radius, radius_at_age)
from .energy import (EnergyParams, OptimResult, avg_energy, avg_retransmissions,
                     find_stationary_points, interference_threshold, min_feasible_stp,
                     optimize, stationary_fn_intf, stationary_fn_noise)
from .stats import AoiStats, analytic_stats

__version__ = "0.1.0"
