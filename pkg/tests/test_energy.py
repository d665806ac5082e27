import math

import pytest

from aoicov.aoi import violation_prob
from aoicov.channel import (Environment, interference_coefficient, mw_to_dbm,
                            noise_coefficient, stp_inverse, reference_params)
from aoicov.coverage import CorrelationParams, eta_threshold
from aoicov.energy import (EnergyParams, avg_energy, avg_retransmissions, closed_form_energy,
                           energy_at_power, find_stationary_points, interference_threshold,
                           min_feasible_stp, optimize, stationary_fn_intf,
                           stationary_fn_noise)
from aoicov.errors import DomainError, InfeasibleError, ValidationError

CP = CorrelationParams(1.76e-2, 1.2e-3)
NL, IL, GEN = Environment.NOISE_LIMITED, Environment.INTERFERENCE_LIMITED, Environment.GENERAL


def test_avg_retransmissions():
    assert avg_retransmissions(1.0, 7) == 1.0
    assert avg_retransmissions(0.5, 1) == 1.0
    assert avg_retransmissions(0.5, 3) == pytest.approx(1 + 0.5 + 0.25)
    assert avg_retransmissions(1e-9, 4) == pytest.approx(4.0, rel=1e-8)
    with pytest.raises(DomainError):
        avg_retransmissions(0.0, 3)


@pytest.mark.parametrize("env", [NL, IL])
@pytest.mark.parametrize("p", [0.05, 0.3, 0.6, 0.95])
def test_closed_forms_match_generic_energy(env, p):
    ep = EnergyParams(reference_params(max_retx=9), 1.0)
    assert closed_form_energy(p, ep, env) == pytest.approx(avg_energy(p, ep, env), rel=1e-10)


def test_energy_at_power_consistent_with_avg_energy():
    ep = EnergyParams(reference_params(max_retx=9), 0.5)
    power = stp_inverse(0.4, ep.system, GEN)
    assert energy_at_power(power, ep, GEN) == pytest.approx(avg_energy(0.4, ep, GEN), rel=1e-9)


def test_closed_form_needs_closed_environment():
    with pytest.raises(ValidationError):
        closed_form_energy(0.5, EnergyParams(reference_params()), GEN)


@pytest.mark.parametrize("N", range(1, 9))
def test_no_noise_limited_stationary_points_below_nine(N):
    assert find_stationary_points(N) is None


@pytest.mark.parametrize("N", [9, 12, 20, 30])
def test_two_noise_limited_stationary_points(N):
    s1, s2 = find_stationary_points(N)
    assert 0 < s1 < s2 < 1
    assert abs(stationary_fn_noise(s1, N)) < 1e-8
    assert abs(stationary_fn_noise(s2, N)) < 1e-8


def test_stationary_values_at_nine():
    s1, s2 = find_stationary_points(9)
    assert s1 == pytest.approx(0.15612, abs=5e-5)
    assert s2 == pytest.approx(0.30759, abs=5e-5)


def test_stationary_points_are_energy_extrema():
    ep = EnergyParams(reference_params(max_retx=12), 1.0)
    s1, s2 = find_stationary_points(12)
    e = lambda p: closed_form_energy(p, ep, NL)  # noqa: E731
    h = 1e-4
    assert e(s1) > e(s1 - h) and e(s1) > e(s1 + h)
    assert e(s2) < e(s2 - h) and e(s2) < e(s2 + h)


def test_interference_threshold_and_roots():
    n = interference_threshold(3.5)
    assert find_stationary_points(n - 1, 3.5, IL) is None
    s1, s2 = find_stationary_points(n, 3.5, IL)
    assert abs(stationary_fn_intf(s2, n, 3.5)) < 1e-8


def test_general_has_no_stationary_scan():
    with pytest.raises(ValidationError):
        find_stationary_points(10, env=GEN)


def test_min_feasible_stp_is_tight():
    thr = eta_threshold(CP)
    p = min_feasible_stp(CP, 1.0, 1.0, 9)
    assert violation_prob(p, thr, 1.0, 1.0, 9) <= 1 - CP.eps_target
    assert violation_prob(p - 1e-6, thr, 1.0, 1.0, 9) > 1 - CP.eps_target
    assert p == pytest.approx(0.197, abs=1e-3)


def test_infeasible_reports_parameter():
    with pytest.raises(InfeasibleError) as exc:
        min_feasible_stp(CP, 1.0, 1.0, 20)
    assert exc.value.parameter == "max_retx"
    with pytest.raises(InfeasibleError) as exc:
        min_feasible_stp(CP, 1.0, 1.0, 5, v_th=0.5)
    assert exc.value.parameter == "eta"


def test_headline_optimum():
    res = optimize(EnergyParams(reference_params(max_retx=9), 1.0), CP, NL)
    assert res.case == "s2"
    assert mw_to_dbm(res.p_t_star) == pytest.approx(-5.18, abs=0.3)
    assert res.p_star == pytest.approx(res.stationary[1])


def test_optimum_selection_cases():
    ep = EnergyParams(reference_params(max_retx=7), 1.0)
    assert optimize(ep, CP, NL).case == "p_cov"
    cp = CorrelationParams(1.76e-2, 4.4e-4)
    ep = EnergyParams(reference_params(max_retx=12), 1.0)
    res = optimize(ep, cp, NL)
    assert res.case.startswith("argmin")
    other = res.stationary[1] if res.case == "argmin:p_cov" else res.p_cov
    assert res.energy_at_opt <= avg_energy(other, ep, NL)


def test_general_optimizer_beats_neighbours():
    cp = CorrelationParams(1.76e-2, 4.4e-4)
    ep = EnergyParams(reference_params(max_retx=20, noise=1e-6), 1.0)
    res = optimize(ep, cp, GEN)
    assert res.case == "general"
    assert res.p_star >= res.p_cov - 1e-9
    for f in (0.99, 1.01):
        p = res.p_t_star * f
        if stp_inverse(res.p_cov, ep.system, GEN) <= p:
            assert energy_at_power(p, ep, GEN) >= res.energy_at_opt * (1 - 1e-12)


def test_coefficients_positive():
    sp = reference_params()
    assert noise_coefficient(sp) > 0 and interference_coefficient(sp) > 0
    assert math.isfinite(energy_at_power(1.0, EnergyParams(sp), GEN))
