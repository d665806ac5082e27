"""Truncation of the interference field to a finite disk.

Two radii matter. The mean-interference radius bounds the Campbell tail
beyond ``R`` to a fraction of the mean (needs an inner exclusion radius,
otherwise the mean diverges). The success probability is governed by far
weaker, farther interferers, so the physical simulator accounts for every
point outside ``R`` through :func:`far_field_success_factor`: with Rayleigh
fading on the useful link, ``P(h >= a + b) = P(h >= a) P(h' >= b)``, hence the
far field acts as an independent Bernoulli thinning of the success event.
"""

from __future__ import annotations

import math

from scipy import integrate

from ..channel import SystemParams


def campbell_mean_interference(params: SystemParams, r_in: float, r_out: float) -> float:
    """Mean aggregate interference from an annulus [r_in, r_out] (unit-mean fading)."""
    a = params.pathloss_exp
    if r_in <= 0:
        raise ValueError("the mean interference diverges without an exclusion radius")
    outer = 0.0 if math.isinf(r_out) else r_out ** (2.0 - a)
    radial = (r_in ** (2.0 - a) - outer) / (a - 2.0)
    return sum(c.power * c.density * 2.0 * math.pi * radial for c in params.interferers)


def campbell_tail_fraction(alpha: float, r_in: float, r_out: float) -> float:
    """Share of the mean interference that lies beyond ``r_out``."""
    return (r_out / r_in) ** (2.0 - alpha)


def default_field_radius(alpha: float, exclusion_radius: float = 1.0,
                         tail: float = 5e-4) -> float:
    """Radius whose Campbell tail is ``tail`` of the mean interference."""
    return exclusion_radius * tail ** (1.0 / (2.0 - alpha))


def _far_field_exponent(params: SystemParams, r_out: float) -> float:
    a = params.pathloss_exp
    scale = params.target_sinr * params.link_distance**a / params.tx_power
    total = 0.0
    for c in params.interferers:
        if c.density == 0.0:
            continue
        k = scale * c.power
        # 1 - E[exp(-k h r^-a)] = 1 / (1 + r^a / k); substitute r = r_out / t
        def integrand(t, k=k):
            r = r_out / t
            return 2.0 * math.pi * r / (1.0 + r**a / k) * r_out / (t * t)

        val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
        total += c.density * val
    return total


def far_field_success_factor(params: SystemParams, r_out: float) -> float:
    """P(success is not spoiled by interferers beyond ``r_out``)."""
    return math.exp(-_far_field_exponent(params, r_out))


def inner_disk_success_factor(params: SystemParams, r_in: float) -> float:
    """Same quantity for interferers inside ``r_in`` (dropped by an exclusion radius)."""
    if r_in <= 0:
        return 1.0
    a = params.pathloss_exp
    scale = params.target_sinr * params.link_distance**a / params.tx_power
    total = 0.0
    for c in params.interferers:
        k = scale * c.power
        val, _ = integrate.quad(lambda r: 2.0 * math.pi * r / (1.0 + r**a / k), 0.0, r_in,
                                epsrel=1e-12)
        total += c.density * val
    return math.exp(-total)


def physical_field_radius(params: SystemParams, max_deficit: float = 1e-2,
                          exclusion_radius: float = 1.0) -> float:
    """Radius used by the physical simulator.

    At least the Campbell radius, and large enough that interferers beyond it
    change the success probability by at most ``max_deficit`` (the remainder is
    still applied exactly via the far-field factor).
    """
    r = default_field_radius(params.pathloss_exp, exclusion_radius)
    while 1.0 - far_field_success_factor(params, r) > max_deficit:
        r *= 1.25
    return r
