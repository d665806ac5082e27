from ._backend import USE_NUMBA
from .engine import (AbstractMode, PhysicalMode, SimConfig, SimRun, run, run_trials,
                     sample_interference, sample_slot_successes, trial_seed)
from .estimate import estimate_stats
from .geometry import (campbell_mean_interference, campbell_tail_fraction,
                       default_field_radius, far_field_success_factor,
                       physical_field_radius)

__all__ = [
    "USE_NUMBA", "AbstractMode", "PhysicalMode", "SimConfig", "SimRun", "run", "run_trials",
    "sample_interference", "sample_slot_successes", "trial_seed", "estimate_stats",
    "campbell_mean_interference", "campbell_tail_fraction", "default_field_radius",
    "far_field_success_factor", "physical_field_radius",
]
