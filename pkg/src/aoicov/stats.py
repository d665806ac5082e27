"""Metric bundle shared by the analytical core and the simulator."""

from __future__ import annotations

from dataclasses import dataclass

from .aoi import average_aoi, violation_prob
from .coverage import CorrelationParams, eta_coverage_probability
from .energy import avg_retransmissions


@dataclass(frozen=True)
class AoiStats:
    avg_aoi: float
    violation: float | None = None
    coverage: float | None = None
    energy: float | None = None
    source: str = "analytic"


def analytic_stats(p_s: float, T_R: float, T_o: float, N: int, v_th: float | None = None,
                   cp: CorrelationParams | None = None, tx_power: float | None = None,
                   sensing_energy: float = 0.0) -> AoiStats:
    """Closed-form counterpart of :func:`aoicov.sim.estimate_stats`."""
    violation = None if v_th is None else violation_prob(p_s, v_th, T_R, T_o, N)
    coverage = None if cp is None else eta_coverage_probability(cp, p_s, T_R, T_o, N)
    energy = None
    if tx_power is not None:
        energy = (sensing_energy + avg_retransmissions(p_s, N) * tx_power * T_o) / N
    return AoiStats(average_aoi(p_s, T_R, T_o, N), violation, coverage, energy, "analytic")
