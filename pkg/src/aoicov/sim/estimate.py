from __future__ import annotations

from typing import Iterable

from ..coverage import CorrelationParams, eta_threshold
from ..errors import ValidationError
from ..stats import AoiStats
from .engine import SimRun


def estimate_stats(runs: SimRun | Iterable[SimRun], v_th: float | None = None,
                   cp: CorrelationParams | None = None, tx_power: float | None = None,
                   sensing_energy: float = 0.0) -> AoiStats:
    """Pool one or more runs into time-average metrics.

    Violation and coverage need their thresholds to have been tracked by the
    runs (``SimConfig.v_th``); energy needs the transmit power in mW.
    """
    runs = [runs] if isinstance(runs, SimRun) else list(runs)
    if not runs:
        raise ValidationError("estimate_stats needs at least one run")
    timing = {(r.retx_interval, r.tx_duration, r.max_retx) for r in runs}
    if len(timing) != 1:
        raise ValidationError("runs were simulated with different timing parameters")
    horizon = sum(r.time_horizon for r in runs)
    if horizon <= 0:
        raise ValidationError("runs contain fewer than two updates; no complete interval")

    avg = sum(r.aoi_integral for r in runs) / horizon
    violation = None
    if v_th is not None:
        violation = sum(r.violated(v_th) for r in runs) / horizon
    coverage = None
    if cp is not None:
        thr = eta_threshold(cp)
        coverage = 0.0 if thr <= 0 else 1.0 - sum(r.violated(thr) for r in runs) / horizon
    energy = None
    if tx_power is not None:
        periods = sum(r.periods for r in runs)
        tx = sum(r.transmissions for r in runs)
        T_R, T_o, N = next(iter(timing))
        energy = (sensing_energy * periods + tx * tx_power * T_o) / (periods * N)
    return AoiStats(avg, violation, coverage, energy, "sim")
