"""Closed-form AoI statistics of the periodic-sensing retransmission scheme.

A sensor senses every ``N * T_R``; inside a sensing period it makes up to
``N`` attempts at offsets ``0, T_R, ..., (N-1) T_R``, each lasting ``T_o``.
Attempts succeed independently with probability ``p_s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import DomainError, ValidationError

_SNAP = 1e-12


def _check_timing(T_R: float, T_o: float, N: int) -> None:
    if not T_R > 0:
        raise ValidationError(f"retx_interval must be > 0, got {T_R}")
    if not 0 < T_o <= T_R:
        raise ValidationError(f"tx_duration must satisfy 0 < T_o <= T_R, got T_o={T_o}, T_R={T_R}")
    if int(N) != N or N < 1:
        raise ValidationError(f"max_retx must be an integer >= 1, got {N}")


def _check_p(p_s: float) -> None:
    if not 0.0 < p_s <= 1.0:
        raise DomainError(f"success probability must lie in (0, 1], got {p_s}")


def fail_pow(p_s: float, k: float) -> float:
    """(1 - p_s)**k with 0**0 = 1, stable for small p_s and large k."""
    if k == 0:
        return 1.0
    if p_s >= 1.0:
        return 0.0
    return math.exp(k * math.log1p(-p_s))


def one_minus_fail_pow(p_s: float, k: float) -> float:
    """1 - (1 - p_s)**k without cancellation."""
    if k == 0:
        return 0.0
    if p_s >= 1.0:
        return 1.0
    return -math.expm1(k * math.log1p(-p_s))


@dataclass(frozen=True)
class TimingMoments:
    e_x: float
    e_x2: float
    e_z: float
    e_z2: float
    e_q: float
    e_l: float


def timing_moments(p_s: float, T_R: float, T_o: float, N: int) -> TimingMoments:
    """Moments of the update-timing variables.

    ``X`` is the delay from the first sensing after an update to the next
    update (geometric in attempts), ``Z`` the age right after an update
    (geometric truncated at ``N`` attempts). ``e_q`` is the expected sawtooth
    area over one inter-update interval, assembled from the X and Z moments;
    ``e_l`` the expected inter-update time.
    """
    _check_p(p_s)
    _check_timing(T_R, T_o, N)
    p = p_s
    q_n = fail_pow(p, N)
    trunc = one_minus_fail_pow(p, N)

    e_x = (1.0 / p - 1.0) * T_R + T_o
    e_x2 = 2.0 * T_R**2 / p**2 - (3.0 * T_R - 2.0 * T_o) * T_R / p + (T_R - T_o) ** 2

    head = 1.0 - q_n * (1.0 + p * N)
    e_z = T_R * head / (p * trunc) - T_R + T_o
    bracket = (T_R / p) * (
        -(N**2) * fail_pow(p, N + 2)
        + (2 * N**2 + 2 * N - 1) * fail_pow(p, N + 1)
        - (N + 1) ** 2 * q_n
        - p
        + 2.0
    ) - 2.0 * (T_R - T_o) * head
    e_z2 = (T_R - T_o) ** 2 + T_R / (p * trunc) * bracket

    period = N * T_R
    # E[Q] = E[(N T_R + X)^2]/2 - E[Z^2]/2 ; E[L] = N T_R - E[Z] + E[X]
    e_q = 0.5 * (period**2 + 2.0 * period * e_x + e_x2) - 0.5 * e_z2
    e_l = period - e_z + e_x
    return TimingMoments(e_x, e_x2, e_z, e_z2, e_q, e_l)


def expected_area_closed(p_s: float, T_R: float, T_o: float, N: int) -> float:
    """E[Q] in its simplified closed form."""
    _check_p(p_s)
    p = p_s
    return N * T_R * ((2.0 + (N - 2) * p) * T_R + 2.0 * p * T_o) / (
        2.0 * p * one_minus_fail_pow(p, N)
    )


def expected_interarrival_closed(p_s: float, T_R: float, N: int) -> float:
    """E[L] = N T_R / (1 - (1-p_s)^N)."""
    _check_p(p_s)
    return N * T_R / one_minus_fail_pow(p_s, N)


def average_aoi(p_s: float, T_R: float, T_o: float, N: int) -> float:
    """Long-run time-average AoI: T_R (1/p_s + (N-2)/2) + T_o."""
    _check_p(p_s)
    _check_timing(T_R, T_o, N)
    return T_R * (1.0 / p_s + (N - 2) / 2.0) + T_o


@dataclass(frozen=True)
class ViolationQuery:
    v_th: float
    p_s: float
    retx_interval: float
    tx_duration: float
    max_retx: int

    def __post_init__(self):
        if not self.v_th > 0:
            raise ValidationError(f"v_th must be > 0, got {self.v_th}")
        _check_p(self.p_s)
        _check_timing(self.retx_interval, self.tx_duration, self.max_retx)


def attempts_within(v_th: float, T_R: float, T_o: float) -> int:
    """Number of attempt slots whose completion age does not exceed ``v_th``.

    floor((v_th - T_o) / T_R) + 1, with a snap-to-integer guard so that
    thresholds sitting on the attempt lattice are not split by rounding.
    """
    x = (v_th - T_o) / T_R
    r = round(x)
    if abs(x - r) <= _SNAP * max(1.0, abs(x)):
        x = r
    return math.floor(x) + 1


def violation_probability(q: ViolationQuery) -> float:
    """Long-run fraction of time the AoI exceeds ``q.v_th``."""
    return _violation(q.p_s, q.v_th, q.retx_interval, q.tx_duration, q.max_retx)


def violation_prob(p_s: float, v_th: float, T_R: float, T_o: float, N: int) -> float:
    """Functional form of :func:`violation_probability`."""
    return violation_probability(ViolationQuery(v_th, p_s, T_R, T_o, N))


def _violation(p: float, v: float, T_R: float, T_o: float, N: int) -> float:
    if v <= T_o:
        return 1.0
    chi = attempts_within(v, T_R, T_o)
    period = N * T_R
    if v <= period:
        num = (p * (T_o - T_R - v) + T_R) * one_minus_fail_pow(p, chi) + p * T_R * (
            N - chi * fail_pow(p, chi)
        )
        val = num / (p * period)
    else:
        k = chi - 1
        lead = p * T_R * k + T_R + p * T_o - p * v
        # (1-p)^(k-N+1) - (1-p)^(k+1) = (1-p)^(k-N+1) * (1 - (1-p)^N)
        tail = fail_pow(p, k - N + 1) * one_minus_fail_pow(p, N)
        val = lead * tail / (p * period)
    return min(1.0, max(0.0, val))


def violation_probability_monotonicity_witness(
    p_grid: Iterable[float], v_th: float, T_R: float, T_o: float, N: int,
    slack: float = 1e-13,
) -> bool:
    """True iff the violation probability is nonincreasing along ``p_grid``.

    ``slack`` absorbs rounding where the curve is flat.
    """
    grid = list(p_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("p_s grid must be strictly increasing")
    values = [violation_prob(p, v_th, T_R, T_o, N) for p in grid]
    return all(b <= a + slack for a, b in zip(values, values[1:]))
