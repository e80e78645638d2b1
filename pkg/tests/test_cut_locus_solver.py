import numpy as np
import pytest
from scipy.integrate import solve_ivp

from s2tos import _geom
from s2tos.cut_locus_solver import (
    corner_asymptotics,
    corner_taylor,
    det_limit_closed_form,
    det_limit_map,
    gamma_o_alpha,
    interior_time,
    jacobian_det,
    limit_meeting_error,
    limit_solution,
    meeting_map,
    rescaled_field,
    rescaled_flow,
    sigma_alpha,
    sigma_limit,
    solve_overlap,
)
from s2tos.params import alpha_from_c, alpha_from_rbar
from s2tos.pendulum_synthesis import overlap_point, pen_flow
from s2tos.so3_kinematics import DomainError


def test_rescaled_flow_identity_at_zero():
    z = 0.3 - 0.7j
    assert abs(rescaled_flow(z, 1, 0.0, 0.1) - z) <= 1e-15


def test_rescaled_flow_matches_ode():
    rng = np.random.default_rng(3)
    a = 0.1
    for _ in range(5):
        z0 = complex(*rng.uniform(-1, 1, 2))
        for eps in (1, -1):
            f = lambda t, y: [rescaled_field(complex(*y), eps, a).real, rescaled_field(complex(*y), eps, a).imag]
            sol = solve_ivp(f, (0, 1.0), [z0.real, z0.imag], method="DOP853", rtol=1e-13, atol=1e-13)
            assert abs(complex(*sol.y[:, -1]) - rescaled_flow(z0, eps, 1.0, a)) <= 1e-8


def test_rescaled_flow_converges_to_pendulum():
    z, t = 0.4 + 0.2j, 1.3
    errs = [abs(rescaled_flow(z, 1, t, a) - pen_flow(z, 1, t)) for a in (0.1, 0.05, 0.025)]
    for e1, e2 in zip(errs, errs[1:]):
        assert 3.0 <= e1 / e2 <= 5.0


def test_rescaled_flow_chart():
    with pytest.raises(DomainError):
        rescaled_flow(20.0, 1, 0.1, 0.1)


def test_sigma_examples():
    a41, a81 = np.pi / 41, np.pi / 81
    s = np.linspace(0, 2 * np.pi, 2001)
    z = sigma_alpha(s, a41)
    assert np.abs(np.abs(z) - 1.0).max() <= 2.0 * a41
    assert abs(z[0] - z[-1]) <= 1e-10
    e41 = np.abs(z - sigma_limit(s, 0.5)).max()
    e81 = np.abs(sigma_alpha(s, a81) - sigma_limit(s, 0.5)).max()
    assert 1.5 <= e41 / e81 <= 3.0


def test_sigma_refuses_outside_c1():
    with pytest.raises(DomainError):
        sigma_alpha(0.5, alpha_from_c(40, np.pi / 16))


def test_corner_asymptotics_examples():
    assert corner_asymptotics(0.0, 0.5) == (2 * np.pi, 0.0)
    # coefficients 3 and 2 belong to the s = pi corner
    sp, t = corner_asymptotics(np.pi - 0.01, 0.5, corner="pi")
    assert sp - np.pi == pytest.approx(0.03, abs=1e-12)
    assert t == pytest.approx(0.02, abs=1e-12)
    sp, t = corner_asymptotics(0.01, 0.5)
    assert sp - 2 * np.pi == pytest.approx(-0.01 / 3, abs=1e-15)
    assert t == pytest.approx(0.02 / 3, abs=1e-15)


@pytest.mark.parametrize("corner", ["zero", "pi"])
def test_corner_seed_converges_fast(corner):
    a = np.pi / 41
    s = 0.05 if corner == "zero" else np.pi - 0.05
    sol = solve_overlap(s, a, corner_asymptotics(s, 0.5, corner))
    assert sol is not None and sol.newton_iters <= 5


def _corner_fit(alpha, d=0.02, n=6):
    # quadratic least squares on the one-sided corner box s >= 0, s~ <= 0:
    # the map has a kink across s = 0 and s~ = 0, where the front branches glue
    rows, vals = [], []
    for s in np.linspace(0, d, n):
        for st in np.linspace(-d, 0, n):
            for t in np.linspace(-d, d, n):
                f = meeting_map(alpha, s, 2 * np.pi + st, t)
                rows.append([1, s, st, t, s * s, st * st, t * t, s * st, s * t, st * t])
                vals.append([f.real, f.imag])
    c, *_ = np.linalg.lstsq(np.array(rows), np.array(vals), rcond=None)
    return c


def test_corner_taylor_coefficients():
    # exact-map expansion at the s = 0 corner, basis (1, s, s~, t, s^2, s~^2, t^2, s s~, s t, s~ t):
    # phi1 = r (s~^2 - s^2) - t^2 + 2 r s t - 2 r s~ t,  phi2 = 2 t - 2 r s + 2 r s~
    r = 0.5
    phi1 = np.array([0, 0, 0, 0, -r, r, -1, 0, 2 * r, -2 * r])
    phi2 = np.array([0, -2 * r, 2 * r, 2, 0, 0, 0, 0, 0, 0])
    errs = []
    for k in (40, 80):
        c = _corner_fit(alpha_from_rbar(k, r))
        errs.append(max(np.abs(c[:, 0] - phi1).max(), np.abs(c[:, 1] - phi2).max()))
    assert errs[1] <= 0.15
    assert 1.5 <= errs[0] / errs[1] <= 3.0


def test_corner_taylor_helper_t_column():
    # central differences are fine along t, which does not cross the gluing kink
    _, grad, hess = corner_taylor(alpha_from_rbar(80, 0.5), h=1e-5)
    assert abs(grad[1, 2] - 2.0) <= 0.05
    assert abs(grad[0, 2]) <= 0.05
    assert abs(hess[0, 2, 2] + 2.0) <= 0.05


def test_meeting_solution_is_a_meeting():
    a = alpha_from_rbar(20, 0.5)
    curve = gamma_o_alpha(a, s_grid=np.linspace(0.05, np.pi - 0.05, 21))
    for o in curve.solutions:
        assert abs(meeting_map(a, o.s, o.s_prime, o.t)) <= 1e-10
        assert abs(rescaled_flow(sigma_alpha(o.s_prime, a), 1, o.t, a) - o.point) <= 1e-10
        assert abs(rescaled_flow(sigma_alpha(o.s, a), -1, o.t, a) - o.point) <= 1e-10
        assert jacobian_det(a, o.s, o.s_prime, o.t) != 0


def test_half_pi_matches_pendulum_order_alpha():
    errs = []
    for k in (20, 40):
        a = alpha_from_rbar(k, 0.5)
        c = gamma_o_alpha(a, s_grid=np.array([np.pi / 2]))
        z, _ = overlap_point(np.pi / 2, 1.0)
        errs.append(abs(c.solutions[0].point - complex(z)))
    assert errs[1] < errs[0] <= 2.0 * alpha_from_rbar(20, 0.5)


def test_endpoints_approach_corners():
    d = []
    for k in (10, 20, 40):
        c = gamma_o_alpha(alpha_from_rbar(k, 0.5))
        d.append(max(abs(c.endpoints[0] + 1.0), abs(c.endpoints[1] - 1.0)))
        assert not c.gaps
    assert d[0] > d[1] > d[2]


def test_feedback_sides_against_interior_time():
    a = alpha_from_rbar(10, 0.5)
    curve = gamma_o_alpha(a, s_grid=np.linspace(0.3, np.pi - 0.3, 9))
    for o in curve.solutions:
        above = interior_time(o.point + 0.05j, a)[1]
        below = interior_time(o.point - 0.05j, a)[1]
        assert (above, below) == (-1, 1)


def test_limit_det_matches_closed_form():
    r = 0.5
    for sp in np.linspace(np.pi + 0.01, 2 * np.pi - 0.01, 101):
        s, sp_, t = limit_solution(sp, r)
        assert limit_meeting_error(s, sp_, t, r) <= 1e-12
        assert abs(det_limit_map(s, sp_, t, r) - det_limit_closed_form(sp_, r)) <= 1e-6
    val = det_limit_closed_form(1.5 * np.pi, r)
    assert val == pytest.approx(-4 * r * (1 - r * r) / (1 + r * r), abs=1e-14)


def test_overlap_polyline_symmetry():
    c = gamma_o_alpha(alpha_from_rbar(20, 0.5))
    p = c.polyline()
    assert _geom.hausdorff(p, -p) <= 0.01
