"""Average energy per retransmission interval and its coverage-constrained minimum."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .aoi import fail_pow, one_minus_fail_pow, violation_prob
from .channel import Environment, SystemParams, noise_coefficient, interference_coefficient
from .channel import stp, stp_inverse
from .coverage import CorrelationParams, eta_threshold
from .errors import ConsistencyError, DomainError, InfeasibleError, ValidationError

SCAN_POINTS = 2000
SCAN_LO = 1e-6
SCAN_HI = 1.0 - 1e-9


@dataclass(frozen=True)
class EnergyParams:
    system: SystemParams
    sensing_energy: float = 1.0

    def __post_init__(self):
        if not self.sensing_energy >= 0:
            raise ValidationError(f"sensing_energy must be >= 0, got {self.sensing_energy}")


@dataclass(frozen=True)
class OptimResult:
    p_cov: float
    stationary: tuple[float, float] | None
    p_star: float
    p_t_star: float
    energy_at_opt: float
    case: str


def avg_retransmissions(p_s: float, N: int) -> float:
    """Mean number of attempts per sensing period, (1 - (1-p_s)^N) / p_s."""
    if not 0.0 < p_s <= 1.0:
        raise DomainError(f"p_s must lie in (0, 1], got {p_s}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    return one_minus_fail_pow(p_s, N) / p_s


def energy_at_power(tx_power: float, ep: EnergyParams,
                    env: Environment = Environment.GENERAL) -> float:
    """Average energy per T_R when transmitting at ``tx_power`` mW."""
    sp = ep.system
    p_s = stp(sp, env, tx_power)
    if p_s == 0.0:
        return math.inf
    n_bar = avg_retransmissions(p_s, sp.max_retx)
    return (ep.sensing_energy + n_bar * tx_power * sp.tx_duration) / sp.max_retx


def avg_energy(p_s: float, ep: EnergyParams, env: Environment = Environment.GENERAL) -> float:
    """Average energy per T_R as a function of the per-attempt success probability."""
    if not 0.0 < p_s < 1.0:
        raise DomainError(f"avg_energy needs 0 < p_s < 1, got {p_s}")
    sp = ep.system
    power = stp_inverse(p_s, sp, env)
    n_bar = avg_retransmissions(p_s, sp.max_retx)
    return ep.sensing_energy / sp.max_retx + power * sp.tx_duration * n_bar / sp.max_retx


def energy_noise_limited(p_s: float, N: int, xi: float, T_o: float, E_s: float) -> float:
    return E_s / N - xi * T_o * one_minus_fail_pow(p_s, N) / (N * p_s * math.log(p_s))


def energy_interference_limited(p_s: float, N: int, zeta: float, alpha: float, T_o: float,
                                E_s: float) -> float:
    return E_s / N + zeta ** (alpha / 2.0) * T_o * one_minus_fail_pow(p_s, N) / (
        N * p_s * (-math.log(p_s)) ** (alpha / 2.0)
    )


def stationary_fn_noise(p_s: float, N: int) -> float:
    """Sign-carrying factor of dE/dp_s in the noise-limited case."""
    ln_p = math.log(p_s)
    num = (1.0 + ln_p) * one_minus_fail_pow(p_s, N) - N * p_s * fail_pow(p_s, N - 1) * ln_p
    return num / (p_s**2 * ln_p**2)


def stationary_fn_intf(p_s: float, N: int, alpha: float) -> float:
    """Sign-carrying factor of dE/dp_s in the interference-limited case."""
    ln_p = math.log(p_s)
    num = (alpha + 2.0 * ln_p) * one_minus_fail_pow(p_s, N) - 2.0 * N * p_s * fail_pow(
        p_s, N - 1
    ) * ln_p
    return num / (p_s**2 * (-ln_p) ** ((2.0 + alpha) / 2.0))


def _stationary_fn(env: Environment, N: int, alpha: float):
    env = Environment.parse(env)
    if env is Environment.NOISE_LIMITED:
        return lambda p: stationary_fn_noise(p, N)
    if env is Environment.INTERFERENCE_LIMITED:
        return lambda p: stationary_fn_intf(p, N, alpha)
    raise ValidationError("stationary points are only defined for the closed-form environments")


def _bisect(fn, a: float, b: float, fa: float, tol: float) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def find_stationary_points(N: int, alpha: float = 3.5,
                           env: Environment = Environment.NOISE_LIMITED,
                           tol: float = 1e-15) -> tuple[float, float] | None:
    """Roots of dE/dp_s in (0, 1): either none or an ordered pair (s1, s2)."""
    fn = _stationary_fn(env, N, alpha)
    grid = np.geomspace(SCAN_LO, SCAN_HI, SCAN_POINTS)
    vals = [fn(p) for p in grid]
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(_bisect(fn, float(grid[i]), float(grid[i + 1]), vals[i], tol))
    if len(roots) == 0:
        return None
    if len(roots) != 2:
        raise ConsistencyError(
            f"expected 0 or 2 stationary points for N={N}, alpha={alpha}, got {len(roots)}"
        )
    return roots[0], roots[1]


@functools.lru_cache(maxsize=None)
def interference_threshold(alpha: float, n_max: int = 500) -> int:
    """Smallest N for which the interference-limited energy has stationary points."""
    for n in range(1, n_max + 1):
        if find_stationary_points(n, alpha, Environment.INTERFERENCE_LIMITED) is not None:
            return n
    raise ConsistencyError(f"no stationary points up to N={n_max} for alpha={alpha}")


def min_feasible_stp(cp: CorrelationParams, T_R: float, T_o: float, N: int,
                     v_th: float | None = None, tol: float = 1e-8) -> float:
    """Smallest p_s whose violation probability at the coverage threshold is <= 1 - eps.

    Relies on the violation probability being nonincreasing in p_s.
    """
    threshold = eta_threshold(cp) if v_th is None else v_th
    budget = 1.0 - cp.eps_target
    if threshold <= T_o:
        raise InfeasibleError(
            f"coverage threshold {threshold:.6g} does not exceed the AoI floor T_o={T_o}; "
            "lower eta or theta_th, or raise corr_u/corr_v",
            parameter="eta",
        )
    best = violation_prob(1.0, threshold, T_R, T_o, N)
    if best > budget:
        raise InfeasibleError(
            f"even p_s=1 gives violation {best:.6g} > 1 - eps_target = {budget:.6g}; "
            f"the sensing period N*T_R={N * T_R:g} is too long for v_th={threshold:.6g}",
            parameter="max_retx",
        )
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if violation_prob(mid, threshold, T_R, T_o, N) <= budget:
            hi = mid
        else:
            lo = mid
    if hi >= 1.0:
        raise InfeasibleError(
            "only p_s = 1 meets the coverage target, which needs infinite power",
            parameter="eps_target",
        )
    return hi


def optimize(ep: EnergyParams, cp: CorrelationParams,
             env: Environment = Environment.NOISE_LIMITED,
             v_th: float | None = None) -> OptimResult:
    """Energy-minimising operating point subject to the coverage constraint."""
    env = Environment.parse(env)
    sp = ep.system
    p_cov = min_feasible_stp(cp, sp.retx_interval, sp.tx_duration, sp.max_retx, v_th)
    if env is Environment.GENERAL:
        return optimize_general(ep, p_cov)

    st = find_stationary_points(sp.max_retx, sp.pathloss_exp, env)
    if st is None:
        p_star, case = p_cov, "p_cov"
    else:
        s1, s2 = st
        if s1 < p_cov < s2:
            p_star, case = s2, "s2"
        elif p_cov >= s2:
            p_star, case = p_cov, "p_cov"
        else:
            e_cov = avg_energy(p_cov, ep, env)
            e_s2 = avg_energy(s2, ep, env)
            # ties go to s2: same energy, fresher information
            if e_s2 <= e_cov:
                p_star, case = s2, "argmin:s2"
            else:
                p_star, case = p_cov, "argmin:p_cov"
    return OptimResult(
        p_cov=p_cov,
        stationary=st,
        p_star=p_star,
        p_t_star=stp_inverse(p_star, sp, env),
        energy_at_opt=avg_energy(p_star, ep, env),
        case=case,
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_general(ep: EnergyParams, p_cov: float, grid: int = 2000,
                     tol_db: float = 1e-4) -> OptimResult:
    """Grid search plus golden-section refinement over log power.

    No closed-form inverse exists when both noise and interference are kept.
    """
    sp = ep.system
    env = Environment.GENERAL
    lo = math.log(stp_inverse(p_cov, sp, env))
    hi = math.log(stp_inverse(SCAN_HI, sp, env))

    def cost(log_p):
        return energy_at_power(math.exp(log_p), ep, env)

    xs = np.linspace(lo, hi, grid)
    vals = [cost(x) for x in xs]
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid - 1)]
    tol = tol_db * math.log(10.0) / 10.0 / 100.0
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = cost(c), cost(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = cost(d)
    candidates = [(vals[i], xs[i]), (cost(0.5 * (a + b)), 0.5 * (a + b))]
    best_e, best_x = min(candidates)
    p_t = math.exp(best_x)
    p_star = stp(sp, env, p_t)
    return OptimResult(p_cov=p_cov, stationary=None, p_star=p_star, p_t_star=p_t,
                       energy_at_opt=best_e, case="general")


def closed_form_energy(p_s: float, ep: EnergyParams, env: Environment) -> float:
    """Closed-form objective for the noise- or interference-limited environment."""
    env = Environment.parse(env)
    sp = ep.system
    if env is Environment.NOISE_LIMITED:
        return energy_noise_limited(p_s, sp.max_retx, noise_coefficient(sp), sp.tx_duration,
                                    ep.sensing_energy)
    if env is Environment.INTERFERENCE_LIMITED:
        return energy_interference_limited(p_s, sp.max_retx, interference_coefficient(sp),
                                           sp.pathloss_exp, sp.tx_duration, ep.sensing_energy)
    raise ValidationError("closed-form energy exists only for noise- or interference-limited")
