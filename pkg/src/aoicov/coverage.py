"""Error-tolerable sensing coverage driven by the AoI at the data center.

Information sensed at one place and time is exponentially correlated with
information at distance ``l`` and later time ``tau``. The disk in which the
aged copy still estimates the field within ``theta_th`` shrinks linearly with
the AoI, which turns coverage statements into AoI-violation statements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aoi import violation_prob
from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class CorrelationParams:
    u: float
    v: float
    theta_th: float = 0.1
    eta: float = 0.6
    eps_target: float = 0.6

    def __post_init__(self):
        if not self.u > 0:
            raise ValidationError(f"corr_u must be > 0, got {self.u}")
        if not self.v > 0:
            raise ValidationError(f"corr_v must be > 0, got {self.v}")
        if not 0 < self.theta_th < 1:
            raise ValidationError(f"theta_th must lie in (0, 1), got {self.theta_th}")
        if not 0 < self.eta <= 1:
            raise ValidationError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0 < self.eps_target < 1:
            raise ValidationError(f"eps_target must lie in (0, 1), got {self.eps_target}")


def _check_lag(l: float, tau: float) -> None:
    if l < 0 or tau < 0:
        raise DomainError(f"distance and time lag must be >= 0, got l={l}, tau={tau}")


def correlation(l: float, tau: float, cp: CorrelationParams) -> float:
    _check_lag(l, tau)
    return math.exp(-cp.u * l - cp.v * tau)


def estimation_error(l: float, tau: float, cp: CorrelationParams) -> float:
    """1 - correlation**2."""
    _check_lag(l, tau)
    return -math.expm1(-2.0 * cp.u * l - 2.0 * cp.v * tau)


def max_radius(cp: CorrelationParams) -> float:
    return -math.log1p(-cp.theta_th) / (2.0 * cp.u)


def max_coverage(cp: CorrelationParams) -> float:
    return math.pi * max_radius(cp) ** 2


def radius_at_age(aoi: float, cp: CorrelationParams) -> float:
    """Coverage radius when the data center's copy is ``aoi`` old (never negative)."""
    if aoi < 0:
        raise DomainError(f"AoI must be >= 0, got {aoi}")
    r = math.sqrt(max_coverage(cp) / math.pi) - (cp.v / cp.u) * aoi
    return max(0.0, r)


def eta_threshold(cp: CorrelationParams) -> float:
    """AoI below which the coverage disk keeps at least ``eta`` of its area."""
    if cp.eta == 1.0:
        return 0.0
    # 1 - sqrt(eta) = (1 - eta) / (1 + sqrt(eta)) avoids cancellation near eta = 1
    shrink = (1.0 - cp.eta) / (1.0 + math.sqrt(cp.eta))
    return (cp.u / cp.v) * max_radius(cp) * shrink


def eta_coverage_probability(cp: CorrelationParams, p_s: float, T_R: float, T_o: float,
                             N: int, v_th: float | None = None) -> float:
    """Probability that coverage exceeds ``eta`` of its maximum.

    ``v_th`` overrides the threshold derived from ``cp``.
    """
    threshold = eta_threshold(cp) if v_th is None else v_th
    if threshold <= 0.0:
        return 0.0
    return 1.0 - violation_prob(p_s, threshold, T_R, T_o, N)
