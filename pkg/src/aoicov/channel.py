"""Per-attempt success probability under Rayleigh fading and PPP interference.

Transmit powers are linear milliwatts everywhere inside the package; dBm only
appears at the CLI boundary through :func:`dbm_to_mw` / :func:`mw_to_dbm`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DomainError, ValidationError

ALPHA_MAX = 6.0


class Environment(enum.Enum):
    GENERAL = "general"
    NOISE_LIMITED = "noise-limited"
    INTERFERENCE_LIMITED = "interference-limited"

    @classmethod
    def parse(cls, value: "str | Environment") -> "Environment":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"noise": "noise-limited", "interference": "interference-limited"}
        key = aliases.get(key, key)
        for env in cls:
            if env.value == key:
                return env
        raise ValueError(f"unknown environment {value!r}")


@dataclass(frozen=True)
class InterfererClass:
    density: float
    power: float

    def __post_init__(self):
        if not self.density >= 0:
            raise ValidationError(f"interferer density must be >= 0, got {self.density}")
        if not self.power > 0:
            raise ValidationError(f"interferer power must be > 0, got {self.power}")


@dataclass(frozen=True)
class SystemParams:
    """Link, interference and retransmission-timing parameters."""

    tx_power: float
    link_distance: float
    pathloss_exp: float
    noise: float
    target_sinr: float
    interferers: tuple[InterfererClass, ...] = field(default_factory=tuple)
    retx_interval: float = 1.0
    tx_duration: float = 1.0
    max_retx: int = 1

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if not self.tx_power > 0:
            raise ValidationError(f"tx_power must be > 0, got {self.tx_power}")
        if not self.link_distance > 0:
            raise ValidationError(f"link_distance must be > 0, got {self.link_distance}")
        if not 2.0 < self.pathloss_exp <= ALPHA_MAX:
            raise ValidationError(
                f"pathloss_exp must lie in (2, {ALPHA_MAX:g}], got {self.pathloss_exp}"
            )
        if not self.noise >= 0:
            raise ValidationError(f"noise must be >= 0, got {self.noise}")
        if not self.target_sinr > 0:
            raise ValidationError(f"target_sinr must be > 0, got {self.target_sinr}")
        if not self.retx_interval > 0:
            raise ValidationError(f"retx_interval must be > 0, got {self.retx_interval}")
        if not 0 < self.tx_duration <= self.retx_interval:
            raise ValidationError(
                "tx_duration must satisfy 0 < T_o <= T_R "
                f"(got T_o={self.tx_duration}, T_R={self.retx_interval})"
            )
        if isinstance(self.max_retx, bool) or int(self.max_retx) != self.max_retx:
            raise ValidationError(f"max_retx must be an integer, got {self.max_retx!r}")
        if self.max_retx < 1:
            raise ValidationError(f"max_retx must satisfy N >= 1, got {self.max_retx}")
        object.__setattr__(self, "max_retx", int(self.max_retx))

    @property
    def sensing_period(self) -> float:
        return self.max_retx * self.retx_interval

    def with_power(self, tx_power: float) -> "SystemParams":
        return replace(self, tx_power=tx_power)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


def c1_alpha(alpha: float) -> float:
    """(2*pi/alpha) * Gamma(2/alpha) * Gamma(1 - 2/alpha)."""
    if not alpha > 2.0:
        raise DomainError(f"C1(alpha) needs alpha > 2 (pole at alpha = 2), got {alpha}")
    a = 2.0 / alpha
    return (2.0 * math.pi / alpha) * math.gamma(a) * math.gamma(1.0 - a)


def noise_coefficient(params: SystemParams) -> float:
    """xi = N_o * delta * d**alpha."""
    return params.noise * params.target_sinr * params.link_distance**params.pathloss_exp


def interference_coefficient(params: SystemParams) -> float:
    """zeta = delta**(2/a) d**2 C1(a) sum_j lambda_j P_j**(2/a)."""
    a = params.pathloss_exp
    total = sum(c.density * c.power ** (2.0 / a) for c in params.interferers)
    if total == 0.0:
        return 0.0
    return params.target_sinr ** (2.0 / a) * params.link_distance**2 * c1_alpha(a) * total


def _coefficients(params: SystemParams, env: Environment) -> tuple[float, float]:
    env = Environment.parse(env)
    xi = 0.0 if env is Environment.INTERFERENCE_LIMITED else noise_coefficient(params)
    zeta = 0.0 if env is Environment.NOISE_LIMITED else interference_coefficient(params)
    return xi, zeta


def stp_exponent(params: SystemParams, env: Environment = Environment.GENERAL,
                 tx_power: float | None = None) -> float:
    """-ln p_s, i.e. xi/P_t + zeta/P_t**(2/alpha)."""
    p_t = params.tx_power if tx_power is None else tx_power
    if not p_t > 0:
        raise ValidationError(f"tx_power must be > 0, got {p_t}")
    xi, zeta = _coefficients(params, env)
    return xi / p_t + zeta / p_t ** (2.0 / params.pathloss_exp)


def stp(params: SystemParams, env: Environment = Environment.GENERAL,
        tx_power: float | None = None) -> float:
    """Success probability of one (re)transmission.

    ``env`` drops the interference term (noise-limited) or the noise term
    (interference-limited). ``tx_power`` overrides ``params.tx_power``.
    """
    return math.exp(-stp_exponent(params, env, tx_power))


def stp_inverse(p_s: float, params: SystemParams,
                env: Environment = Environment.GENERAL) -> float:
    """Transmit power (mW) at which :func:`stp` equals ``p_s``."""
    env = Environment.parse(env)
    if not 0.0 < p_s < 1.0:
        raise DomainError(f"stp_inverse needs 0 < p_s < 1, got {p_s}")
    target = -math.log(p_s)
    xi, zeta = _coefficients(params, env)
    if env is Environment.NOISE_LIMITED:
        if xi == 0.0:
            raise DomainError("noise-limited inverse undefined: noise coefficient is zero")
        return xi / target
    if env is Environment.INTERFERENCE_LIMITED:
        if zeta == 0.0:
            raise DomainError("interference-limited inverse undefined: no interferers")
        # zeta / P^(2/alpha) = -ln p_s  =>  P = (zeta / -ln p_s)^(alpha/2)
        return (zeta / target) ** (params.pathloss_exp / 2.0)
    if xi == 0.0 and zeta == 0.0:
        raise DomainError("stp is identically 1: no noise and no interferers")
    return _bisect_log_power(target, xi, zeta, params.pathloss_exp)


def _bisect_log_power(target: float, xi: float, zeta: float, alpha: float,
                      lo: float = 1e-9, hi: float = 1e9) -> float:
    # exponent(lnP) is strictly decreasing; solve exponent(lnP) = target
    def exponent(log_p):
        return xi * math.exp(-log_p) + zeta * math.exp(-2.0 * log_p / alpha)

    a, b = math.log(lo), math.log(hi)
    while exponent(a) < target:
        a -= 10.0
    while exponent(b) > target:
        b += 10.0
    while b - a > 1e-13 * max(1.0, abs(a), abs(b)):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if exponent(mid) > target:
            a = mid
        else:
            b = mid
    return math.exp(0.5 * (a + b))


def reference_interferers() -> tuple[InterfererClass, ...]:
    return (InterfererClass(8.7e-5, 40.0), InterfererClass(8.7e-5, 30.0))


def reference_params(tx_power: float = 1.0, max_retx: int = 10, **overrides) -> SystemParams:
    """Default operating point (distance 20 m, alpha 3.5, two interferer classes)."""
    base = dict(
        tx_power=tx_power,
        link_distance=20.0,
        pathloss_exp=3.5,
        noise=1e-5,
        target_sinr=1.0,
        interferers=reference_interferers(),
        retx_interval=1.0,
        tx_duration=1.0,
        max_retx=max_retx,
    )
    base.update(overrides)
    return SystemParams(**base)


def interferer_list(pairs: Sequence[tuple[float, float]]) -> tuple[InterfererClass, ...]:
    return tuple(InterfererClass(d, p) for d, p in pairs)
