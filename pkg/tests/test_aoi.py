import math

import pytest

from aoicov.aoi import (ViolationQuery, attempts_within, average_aoi,
                        expected_area_closed, expected_interarrival_closed, fail_pow,
                        one_minus_fail_pow, timing_moments, violation_prob,
                        violation_probability, violation_probability_monotonicity_witness)
from aoicov.errors import DomainError, ValidationError
from oracles import brute_average_aoi, brute_moments, brute_violation

CASES = [(0.3, 1.0, 1.0, 5), (0.5, 2.0, 0.5, 10), (0.8, 1.0, 0.25, 20), (0.05, 1.0, 1.0, 3),
         (0.97, 3.0, 2.0, 1), (1.0, 1.0, 1.0, 4)]


@pytest.mark.parametrize("p,T_R,T_o,N", CASES)
def test_moments_against_series(p, T_R, T_o, N):
    m = timing_moments(p, T_R, T_o, N)
    ref = brute_moments(p, T_R, T_o, N)
    for k, v in ref.items():
        assert getattr(m, k) == pytest.approx(v, rel=1e-10), k


@pytest.mark.parametrize("p,T_R,T_o,N", CASES)
def test_average_aoi_chain(p, T_R, T_o, N):
    m = timing_moments(p, T_R, T_o, N)
    assert m.e_q == pytest.approx(expected_area_closed(p, T_R, T_o, N), rel=1e-12)
    assert m.e_l == pytest.approx(expected_interarrival_closed(p, T_R, N), rel=1e-12)
    assert average_aoi(p, T_R, T_o, N) == pytest.approx(m.e_q / m.e_l, rel=1e-12)
    assert average_aoi(p, T_R, T_o, N) == pytest.approx(brute_average_aoi(p, T_R, T_o, N),
                                                        rel=1e-10)


def test_average_aoi_values():
    assert average_aoi(1.0, 1.0, 1.0, 10) == 6.0
    assert average_aoi(0.5, 1.0, 1.0, 2) == 3.0


def test_fail_pow_edge_cases():
    assert fail_pow(1.0, 0) == 1.0
    assert fail_pow(1.0, 3) == 0.0
    assert one_minus_fail_pow(1.0, 0) == 0.0
    assert one_minus_fail_pow(1e-12, 5) == pytest.approx(5e-12, rel=1e-9)


@pytest.mark.parametrize("v,T_R,T_o,expected", [
    (1.0, 1.0, 1.0, 1), (1.5, 1.0, 1.0, 1), (2.0, 1.0, 1.0, 2), (3.0 - 1e-14, 1.0, 1.0, 3),
    (0.7 + 0.2, 0.1, 0.2, 8), (5.0, 2.0, 1.0, 3),
])
def test_attempts_within(v, T_R, T_o, expected):
    assert attempts_within(v, T_R, T_o) == expected


@pytest.mark.parametrize("p,T_R,T_o,N", CASES)
@pytest.mark.parametrize("frac", [0.3, 0.77, 0.999, 1.0, 1.001, 1.05, 1.3, 2.2])
def test_violation_against_enumeration(p, T_R, T_o, N, frac):
    v = max(frac * N * T_R, T_o * 1.01)
    assert violation_prob(p, v, T_R, T_o, N) == pytest.approx(
        brute_violation(p, v, T_R, T_o, N), abs=1e-10)


def test_violation_below_floor_is_one():
    assert violation_prob(0.5, 0.5, 1.0, 1.0, 5) == 1.0
    assert violation_prob(0.5, 1.0, 1.0, 1.0, 5) == pytest.approx(1.0)


def test_violation_far_tail_vanishes():
    assert violation_prob(0.9, 200.0, 1.0, 1.0, 5) < 1e-100


def test_violation_query_dataclass():
    q = ViolationQuery(v_th=3.5, p_s=0.3, retx_interval=1.0, tx_duration=1.0, max_retx=5)
    assert violation_probability(q) == violation_prob(0.3, 3.5, 1.0, 1.0, 5)
    with pytest.raises(ValidationError):
        ViolationQuery(0.0, 0.3, 1.0, 1.0, 5)


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.2, math.nan])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        average_aoi(bad, 1.0, 1.0, 5)


def test_timing_validation():
    with pytest.raises(ValidationError):
        average_aoi(0.5, 1.0, 2.0, 5)
    with pytest.raises(ValidationError):
        average_aoi(0.5, 1.0, 1.0, 0)


def test_witness_rejects_unsorted_grid():
    with pytest.raises(ValidationError):
        violation_probability_monotonicity_witness([0.5, 0.4], 3.0, 1.0, 1.0, 5)
