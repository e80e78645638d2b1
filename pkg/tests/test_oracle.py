import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from s2tos import _kernels, oracle
from s2tos.cut_locus_solver import gamma_o_alpha, interior_time
from s2tos.params import alpha_from_rbar
from s2tos.pendulum_synthesis import overlap_point

HAVE_CYTHON = _kernels.compiled_kernels is not None
needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernels not built")


@pytest.fixture(scope="module")
def pend():
    return oracle.pendulum_grid_oracle(1.0, 0.01, 0.01)


def test_pendulum_origin(pend):
    i, j = pend.index_of(0j)
    assert abs(pend.values[i, j] - np.pi / 3) <= 2 * pend.h * (1 + np.pi)


def test_pendulum_probe_errors_refine():
    errs = []
    for h in (0.02, 0.01):
        gm = oracle.pendulum_grid_oracle(1.0, h, h)
        errs.append(np.abs(oracle.pendulum_errors(gm, oracle.probe_points(1.0, 100, 0))).mean())
    assert 1.5 <= errs[0] / errs[1] <= 3.0


def test_two_family_cells_lie_on_locus(pend):
    z, _ = overlap_point(np.linspace(1e-3, np.pi - 1e-3, 2001), 1.0)
    z = np.concatenate([z, -z])
    xs, ys = pend.centers()
    ii, jj = np.nonzero(oracle.two_family_cells(pend))
    assert len(ii) > 50
    d = np.array([np.abs(z - complex(xs[i], ys[j])).min() for i, j in zip(ii, jj)])
    assert d.max() <= 3 * pend.h


def test_no_strict_zero_control(pend):
    assert not oracle.strict_zero_control(pend, margin=pend.h + pend.dt).any()


def test_pendulum_dt_domain():
    with pytest.raises(ValueError):
        oracle.pendulum_grid_oracle(1.0, 0.01, 0.02)


@needs_cython
def test_backends_bit_identical_pendulum():
    a = oracle.pendulum_grid_oracle(1.2, 0.04, 0.03, backend="python")
    b = oracle.pendulum_grid_oracle(1.2, 0.04, 0.03, backend="cython")
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.per_control, b.per_control)
    assert np.array_equal(a.tags, b.tags)
    assert a.stats["pops"] == b.stats["pops"]


@needs_cython
def test_backends_bit_identical_sphere():
    al = alpha_from_rbar(10, 0.5)
    box = oracle.CellBox.square(1.3, 0.05)
    a = oracle.sphere_family_oracle(al, box, n_si=100, n_sf=50, backend="python", threads=1)
    b = oracle.sphere_family_oracle(al, box, n_si=100, n_sf=50, backend="cython", threads=1)
    assert np.array_equal(a.per_control, b.per_control)
    assert np.array_equal(a.arg_points, b.arg_points, equal_nan=True)
    assert a.stats["endpoints"] == b.stats["endpoints"]


def test_sphere_thread_count_invariant():
    al = alpha_from_rbar(10, 0.5)
    box = oracle.CellBox.square(1.3, 0.05)
    maps = [oracle.sphere_family_oracle(al, box, n_si=200, n_sf=60, threads=t) for t in (1, 3)]
    assert np.array_equal(maps[0].per_control, maps[1].per_control)
    assert np.array_equal(maps[0].arg_points, maps[1].arg_points, equal_nan=True)


def test_sphere_values_match_synthesis():
    al = alpha_from_rbar(10, 0.5)
    gm = oracle.sphere_family_oracle(al, oracle.CellBox.square(1.3, 0.02), n_si=600, n_sf=300)
    probes = oracle.sphere_probe_points(al, 30, seed=1)
    c_center, at_arg = oracle.sphere_probe_errors(gm, probes, al)
    # the oracle value is the time of an actual extremal, so it can't beat the synthesis
    assert np.nanmin(at_arg) >= -1e-6
    assert np.nanmax(np.abs(at_arg)) <= 1e-6
    assert np.nanmax(np.abs(c_center)) <= 3.0


def test_sphere_two_families_along_overlap():
    al = alpha_from_rbar(10, 0.5)
    gm = oracle.sphere_family_oracle(al, oracle.CellBox.square(1.3, 0.02), n_si=600, n_sf=300)
    curve = gamma_o_alpha(al, s_grid=np.linspace(0.3, np.pi - 0.3, 41))
    cells = oracle.cells_on_polyline(gm, curve.points())
    flags = oracle.family_switch_cells(gm, cells)
    assert np.mean(flags) >= 0.9


def test_sphere_family_of_cell_matches_feedback():
    al = alpha_from_rbar(10, 0.5)
    gm = oracle.sphere_family_oracle(al, oracle.CellBox.square(1.3, 0.02), n_si=600, n_sf=300)
    for z in (0.4j, -0.4j, 0.3 + 0.5j):
        i, j = gm.index_of(z)
        assert gm.tags[i, j] == interior_time(gm.center_of(i, j), al)[1]


def test_cell_box_centred():
    box = oracle.CellBox.square(1.0, 0.1)
    assert box.n1 % 2 == 1
    assert box.lo1 + (box.n1 // 2 + 0.5) * box.h == pytest.approx(0.0, abs=1e-15)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("S2TOS_THREADS", "3")
    assert oracle.thread_count() == 3
    assert oracle.thread_count(2) == 2


def test_backend_env_selection():
    code = "from s2tos import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, S2TOS_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    if HAVE_CYTHON:
        env["S2TOS_BACKEND"] = "cython"
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "cython"
    with pytest.raises(ValueError):
        _kernels.get("fortran")
    importlib.reload(_kernels)


def test_sphere_pole_converges_order_h():
    al = alpha_from_rbar(10, 0.5)
    t_pole = interior_time(0j, al)[0]
    errs = []
    for h in (0.04, 0.02):
        gm = oracle.sphere_family_oracle(al, oracle.CellBox.square(0.2, h), n_si=1000, n_sf=500)
        i, j = gm.index_of(0j)
        errs.append(t_pole - gm.values[i, j])
    # the cell holds an earlier endpoint than its centre, by about h / 1.5
    assert errs[0] > errs[1] > 0
    assert 1.5 <= errs[0] / errs[1] <= 3.0
