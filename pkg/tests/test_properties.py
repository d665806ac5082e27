"""Randomised checks of structural properties of the closed forms."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from aoicov.aoi import average_aoi, timing_moments, violation_prob
from aoicov.channel import Environment, stp, stp_inverse, reference_params
from oracles import brute_violation

probs = st.floats(0.02, 1.0)
timing = st.tuples(st.floats(0.2, 4.0), st.floats(0.05, 1.0), st.integers(1, 25)).map(
    lambda t: (t[0], t[0] * t[1], t[2]))


@settings(max_examples=300, deadline=None)
@given(probs, timing, st.floats(0.0, 3.0))
def test_violation_is_a_probability(p, tm, frac):
    T_R, T_o, N = tm
    v = frac * N * T_R
    val = violation_prob(p, v, T_R, T_o, N) if v > 0 else 1.0
    assert 0.0 <= val <= 1.0


@settings(max_examples=200, deadline=None)
@given(probs, probs, timing, st.floats(0.05, 2.5))
def test_violation_nonincreasing_in_p(p1, p2, tm, frac):
    T_R, T_o, N = tm
    lo, hi = sorted((p1, p2))
    v = frac * N * T_R
    assume(v > 0)
    assert violation_prob(hi, v, T_R, T_o, N) <= violation_prob(lo, v, T_R, T_o, N) + 1e-12


@settings(max_examples=200, deadline=None)
@given(probs, timing, st.floats(0.05, 2.5), st.floats(0.01, 1.0))
def test_violation_nonincreasing_in_threshold(p, tm, frac, step):
    T_R, T_o, N = tm
    v = frac * N * T_R
    assume(v > 0)
    assert violation_prob(p, v + step, T_R, T_o, N) <= violation_prob(p, v, T_R, T_o, N) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 1.0), timing, st.floats(0.1, 2.0))
def test_violation_matches_enumeration(p, tm, frac):
    T_R, T_o, N = tm
    v = max(frac * N * T_R, 1.001 * T_o)
    assert violation_prob(p, v, T_R, T_o, N) == pytest.approx(
        brute_violation(p, v, T_R, T_o, N), abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(probs, timing)
def test_aoi_bounds(p, tm):
    T_R, T_o, N = tm
    a = average_aoi(p, T_R, T_o, N)
    # never below the fully reliable value, decreasing in p
    assert a >= average_aoi(1.0, T_R, T_o, N) - 1e-12
    m = timing_moments(p, T_R, T_o, N)
    # variances are nonnegative (Z is degenerate when N = 1)
    assert m.e_x2 - m.e_x**2 >= -1e-9 * m.e_x2
    assert m.e_z2 - m.e_z**2 >= -1e-9 * max(1.0, m.e_z2)
    assert T_o - 1e-12 <= m.e_z <= (N - 1) * T_R + T_o + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-3.0, 3.0), st.sampled_from(list(Environment)),
       st.floats(2.2, 5.5), st.floats(5.0, 60.0))
def test_inverse_round_trip_over_six_decades(log_p, env, alpha, d):
    sp = reference_params(pathloss_exp=alpha, link_distance=d)
    power = 10.0**log_p
    p = stp(sp, env, power)
    assume(1e-300 < p < 1 - 1e-12)
    assert stp_inverse(p, sp, env) == pytest.approx(power, rel=1e-8)
