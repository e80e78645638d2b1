import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s2tos.extremal_flow import (
    CONJUGATE_POINT,
    LOCALLY_OPTIMAL,
    REFLECTING,
    BangSequence,
    extremal_endpoint,
    interior_duration,
    interior_duration_ds,
    local_optimality,
    switch_time,
    switch_time_derivative,
    switch_time_roots,
    switching_curve,
    switching_curve_points,
    switching_curve_verdict,
)
from s2tos.params import AlphaParam, alpha_from_rbar, alpha_r0, n_mon
from s2tos.so3_kinematics import NORTH, DomainError, bang_field, conjugate_pair, mirror_x3, rot_apply, rot_exp


def test_v_examples():
    for a in (0.05, 0.3):
        assert interior_duration(0.0, a) == np.pi
        assert interior_duration(np.pi, a) == pytest.approx(np.pi, abs=1e-15)
    assert interior_duration(np.pi / 2, np.pi / 8) == pytest.approx(np.pi + 2 * np.arctan(np.tan(np.pi / 8) ** 2), abs=1e-14)
    # independent high-precision evaluation
    assert interior_duration(np.pi / 2, np.pi / 8) == pytest.approx(3.481429563043915, abs=1e-14)


@pytest.mark.parametrize("alpha", [1e-3, 0.1, 0.5, np.pi / 4 - 1e-3])
def test_v_above_pi(alpha):
    s = np.linspace(0, np.pi, 10**4)[1:-1]
    assert np.all(interior_duration(s, alpha) > np.pi)


def test_v_derivative_matches_difference():
    s = np.linspace(0.1, 3.0, 50)
    h = 1e-6
    fd = (interior_duration(s + h, 0.2) - interior_duration(s - h, 0.2)) / (2 * h)
    assert np.abs(fd - interior_duration_ds(s, 0.2)).max() <= 1e-8


def test_endpoint_examples():
    a = 0.2
    p, t = extremal_endpoint(BangSequence(1, 0.4, 1), a)
    assert t == 0.4
    assert np.abs(p - rot_apply(bang_field(a, 1), 0.4, NORTH)).max() <= 1e-15
    p, t = extremal_endpoint(BangSequence(1, np.pi, 2, np.pi), a)
    cp = conjugate_pair(np.pi, a)
    assert np.abs(p - rot_exp(cp.z_plus, cp.theta) @ NORTH).max() <= 1e-10
    assert t == pytest.approx(2 * np.pi)


def test_endpoint_rejects_long_final_arc():
    with pytest.raises(DomainError):
        extremal_endpoint(BangSequence(1, 1.0, 3, 5.0), 0.2)


def test_switching_curve_examples():
    a = 0.1
    p, _, _ = switching_curve_points(1, 1, 1e-9, a, check=False)
    assert np.abs(p - rot_exp(bang_field(a, 1), np.pi) @ NORTH).max() <= 1e-8
    cp = switching_curve(3, 1, 1.2, a)
    cm = switching_curve(3, -1, 1.2, a)
    assert np.abs(mirror_x3(cp.point) - cm.point).max() <= 1e-12
    smp = switching_curve(2, 1, np.pi / 2, np.pi / 8)
    assert smp.arrival_time == pytest.approx(np.pi / 2 + 2 * interior_duration(np.pi / 2, np.pi / 8), abs=1e-12)
    assert smp.arrival_time == pytest.approx(8.533655452882727, abs=1e-14)


def test_switching_tangent_matches_difference():
    a, h = 0.15, 1e-6
    s = np.linspace(0.2, 3.0, 11)
    _, dp, _ = switching_curve_points(4, -1, s, a)
    fd = (switching_curve_points(4, -1, s + h, a)[0] - switching_curve_points(4, -1, s - h, a)[0]) / (2 * h)
    assert np.abs(fd - dp).max() <= 1e-7


def test_switching_curve_domain():
    with pytest.raises(DomainError):
        switching_curve(0, 1, 1.0, 0.1)
    with pytest.raises(DomainError):
        switching_curve(AlphaParam.from_alpha(0.1).k_max + 1, 1, 1.0, 0.1)


def test_switch_time_derivative_examples():
    assert switch_time_derivative(0, 1.3, 0.2) == 1.0
    assert n_mon(0.1) == 48
    assert switch_time_derivative(n_mon(0.1), np.pi, 0.1) > 0


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2])
def test_switch_times_increasing(alpha):
    s = np.linspace(0, np.pi, 2001)
    for k in range(1, n_mon(alpha) + 1, max(1, n_mon(alpha) // 7)):
        assert switch_time_derivative(k, s, alpha).min() > 0


@pytest.mark.parametrize("alpha", [0.1, np.pi / 21])
def test_no_interior_switch_at_multiples_of_pi(alpha):
    km = AlphaParam.from_alpha(alpha).k_max
    for k in range(1, km + 1):
        for j in range(0, k):
            assert switch_time_roots(j, k, alpha) == []


@given(st.floats(0.01, np.pi), st.integers(1, 5))
def test_mirror_commutes(s, k):
    a = 0.12
    p, dp, _ = switching_curve_points(k, 1, s, a)
    q, dq, _ = switching_curve_points(k, -1, s, a)
    assert np.abs(mirror_x3(p) - q).max() <= 1e-12
    assert np.abs(mirror_x3(dp) - dq).max() <= 1e-12


def test_local_optimality_reflecting_at_kmax():
    a = alpha_from_rbar(20, 0.5)
    km = AlphaParam.from_alpha(a).k_max
    for s in np.linspace(0.05, np.pi - 0.05, 25):
        assert switching_curve_verdict(km, 1, s, a) == REFLECTING


def test_local_optimality_kmax_minus_two():
    a = np.pi / 21
    km = AlphaParam.from_alpha(a).k_max
    for s in np.linspace(0.05, np.pi - 0.05, 25):
        assert switching_curve_verdict(km - 2, 1, s, a) == LOCALLY_OPTIMAL


def test_r0_transition_near_sbar():
    # at r = 0 the transition belongs to the curve C_{k_M - 1}
    a = alpha_r0(10)
    km = AlphaParam.from_alpha(a).k_max
    s = np.linspace(0.05, np.pi - 0.05, 400)
    v = [switching_curve_verdict(km - 1, 1, x, a) for x in s]
    change = [s[i] for i in range(len(s) - 1) if v[i] != v[i + 1]]
    assert v[0] == LOCALLY_OPTIMAL
    assert change and abs(change[0] - np.arccos(np.sqrt(1 / 3))) < 0.1


def test_degenerate_basis_at_pole():
    with pytest.raises(DomainError):
        local_optimality(NORTH, np.array([1.0, 0.0, 0.0]), 0.2)


def test_conjugate_point_label_on_field():
    a = 0.2
    p = rot_apply(bang_field(a, 1), 0.5, NORTH)
    assert local_optimality(p, bang_field(a, 1) @ p, a) == CONJUGATE_POINT


def test_switch_time_formula():
    s = np.linspace(0, np.pi, 7)
    assert np.allclose(switch_time(3, s, 0.1), s + 3 * interior_duration(s, 0.1))


def test_verdict_next_to_the_parallel_circle():
    # at s = pi - 1e-6 the fields are nearly parallel, but not degenerate
    for k in range(1, AlphaParam.from_alpha(0.2).k_max):
        left, right = switching_curve_verdict(k, 1, np.pi, 0.2)
        assert left in (LOCALLY_OPTIMAL, REFLECTING) and right in (LOCALLY_OPTIMAL, REFLECTING)
