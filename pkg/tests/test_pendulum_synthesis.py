import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s2tos.extremal_flow import REFLECTING
from s2tos.pendulum_synthesis import (
    adjoint_switch_residual,
    feedback,
    min_time,
    min_time_from_circle,
    overlap_locus_residual,
    overlap_param,
    overlap_point,
    overlap_point_from_sprime,
    pen_flow,
    pendulum_synthesis,
    semicircle_verdicts,
    side_of_overlap,
    source_feedback,
    source_point,
    switching_semicircles,
    synthesis_grid,
)
from s2tos.so3_kinematics import DomainError


def test_pen_flow_examples():
    assert pen_flow(0j, 1, np.pi) == pytest.approx(-2.0, abs=1e-15)
    z0 = 0.3 - 0.2j
    assert abs(pen_flow(z0, 1, 2 * np.pi) - z0) <= 1e-15


def test_pen_flow_solves_ode():
    from scipy.integrate import solve_ivp

    z0, u = 0.4 + 0.1j, -1
    sol = solve_ivp(lambda t, y: [-(y[1]), y[0] + u], (0, 1.7), [z0.real, z0.imag], rtol=1e-12, atol=1e-12)
    z = pen_flow(z0, u, 1.7)
    assert abs(complex(*sol.y[:, -1]) - z) <= 1e-9


def test_source_feedback_examples():
    rho = 0.8
    # source_point(theta) = -rho e^{-i theta}; theta = pi/2 gives (0, rho)
    assert source_point(np.pi / 2, rho) == pytest.approx(1j * rho)
    assert source_feedback(-np.pi / 2 % (2 * np.pi), rho) == 1
    assert source_feedback(np.pi / 2, rho) == -1
    assert source_feedback(np.pi, rho) == 0


def test_semicircles_rho_one():
    sc = switching_semicircles(1.0)
    for c in sc:
        assert c.center == 0.0
        th = np.linspace(0, np.pi, 9)
        assert np.allclose(np.abs(c.point(th)), 1.0)
    assert set(semicircle_verdicts(1.0)) == {REFLECTING}


def test_semicircles_rho_two_match_overlap():
    sp = np.linspace(np.pi + 0.1, 2 * np.pi - 0.1, 21)
    _, t, z = overlap_point_from_sprime(sp, 2.0)
    sc = switching_semicircles(2.0)
    assert np.abs(z - sc[1].point(t)).max() <= 1e-12
    # the same points flow into the origin along u = -1 arcs
    assert np.allclose(np.abs(z - 1.0), 1.0, atol=1e-12)
    assert all(c.optimal for c in sc)


def test_overlap_locus_examples():
    assert overlap_locus_residual(0j, 1.0) == 0.0
    for c in (0.1, -0.4, 0.9):
        assert overlap_locus_residual(1j * c, 1.2) == pytest.approx(c**4 + (4 - 1.44) * c * c)
        assert overlap_locus_residual(1j * c, 1.2) > 0


def test_overlap_param_examples():
    assert overlap_param(np.pi, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert overlap_param(1.5 * np.pi, 1.0) == pytest.approx(2 * np.arctan(0.5), abs=1e-15)
    assert 2 * np.arctan(0.5) == pytest.approx(0.92730, abs=1e-5)


def test_min_time_examples():
    assert min_time(0j, 1.0) == pytest.approx(np.pi / 3, abs=1e-9)
    recs = min_time_from_circle(0j, 1.0)
    assert {r.family for r in recs} == {-1, 1}
    assert min_time(np.exp(0.7j), 1.0) == 0.0
    with pytest.raises(DomainError):
        min_time_from_circle(1.5, 1.0)


@given(st.floats(np.pi + 0.01, 2 * np.pi - 0.01), st.floats(0.2, 1.9))
def test_overlap_points_are_cut_points(sp, rho):
    _, t, z = overlap_point_from_sprime(sp, rho)
    assert abs(overlap_locus_residual(z, rho)) <= 1e-10
    recs = min_time_from_circle(z, rho)
    assert len(recs) == 2 and {r.family for r in recs} == {-1, 1}
    assert abs(recs[0].time - recs[1].time) <= 1e-9
    assert abs(recs[0].time - t) <= 1e-9


@given(st.floats(-0.95, 0.95), st.floats(-0.95, 0.95))
def test_feedback_consistency(x, y):
    z = complex(x, y)
    rho = 1.0
    if abs(z) >= rho * 0.999 or side_of_overlap(z, rho) == 0:
        return
    recs = min_time_from_circle(z, rho)
    if len(recs) == 2:
        return
    assert recs[0].family == feedback(z, rho)
    assert recs[0].time < np.pi


def test_overlap_reflection():
    s = np.linspace(0.1, 3.0, 9)
    z, t = overlap_point(s, 1.0)
    assert np.all(np.abs([overlap_locus_residual(w, 1.0) for w in z]) <= 1e-12)
    assert np.all(t > 0)


def test_adjoint_consistency():
    for rho in (0.5, 1.0, 1.5):
        for th in np.linspace(0.1, np.pi - 0.1, 15):
            assert adjoint_switch_residual(th, rho) <= 1e-12


def test_synthesis_export():
    syn = pendulum_synthesis(1.0, 41)
    assert len(syn.rows()) == 41
    rows = synthesis_grid(1.0, np.linspace(-0.9, 0.9, 7), np.linspace(-0.9, 0.9, 7))
    assert all(r[3] < np.pi for r in rows)


def test_rho_domain():
    with pytest.raises(DomainError):
        switching_semicircles(2.5)
