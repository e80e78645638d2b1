"""The eight acceptance criteria with their pinned tolerances.

Each criterion returns a CriterionResult holding the measured metrics, the
verdict, and the wall time against its budget. tests/test_acceptance.py and
the ``verify`` subcommand both run these functions, so the thresholds live
in exactly one place: the TOL table below.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

TOL = {
    "c1_identity": 1e-9,
    "c1_norm": 1e-12,
    "c1_budget": 1.0,
    "c2_slope": 3.0,
    "c2_slope_band": 0.3,
    "c2_budget": 10.0,
    "c3_radius_rel": 0.10,
    "c3_budget": 5.0,
    "c4_origin": 1e-9,
    "c4_locus": 1e-10,
    "c4_times": 1e-9,
    "c4_grid_factor": 3.0,
    "c4_h": 5e-3,
    "c4_budget": 60.0,
    "c5_ratio_lo": 1.5,
    "c5_ratio_hi": 3.0,
    "c5_det": 1e-6,
    "c5_budget": 120.0,
    "c6_doubles": 1e-10,
    "c6_v_relation": 1e-6,
    "c6_budget": 30.0,
    "c7_ratio_lo": 1.5,
    "c7_ratio_hi": 3.0,
    "c7_budget": 30.0,
    "c8_cell": 0.02,
    "c8_argmin": 1e-6,
    "c8_budget": 300.0,
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0
    budget: float = float("inf")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({self.elapsed:.2f}s / {self.budget:.0f}s)"


def _finish(num, title, checks: dict, metrics: dict, t0: float, budget: float) -> CriterionResult:
    elapsed = time.perf_counter() - t0
    checks = dict(checks)
    checks["runtime"] = elapsed < budget
    metrics = dict(metrics)
    metrics["checks"] = {k: bool(v) for k, v in checks.items()}
    return CriterionResult(num, title, all(checks.values()), metrics, elapsed, budget)


# -- 1 ---------------------------------------------------------------------------------


def criterion_1(n: int = 500, seed: int = 0) -> CriterionResult:
    from .so3_kinematics import bang_field, conjugate_pair, rot_exp

    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst_id, worst_norm = 0.0, 0.0
    for _ in range(n):
        t = rng.uniform(0.0, 2.0 * np.pi)
        a = rng.uniform(1e-3, np.pi / 4)
        cp = conjugate_pair(t, a)
        lhs = rot_exp(cp.z_minus, cp.theta)
        rhs = rot_exp(bang_field(a, 1), t) @ rot_exp(bang_field(a, -1), t)
        worst_id = max(worst_id, float(np.abs(lhs - rhs).max()))
        x = rng.normal(size=3)
        x /= np.linalg.norm(x)
        worst_norm = max(worst_norm, abs(np.linalg.norm(lhs @ x) - 1.0), abs(np.linalg.norm(rhs @ x) - 1.0))
    checks = {"identity": worst_id <= TOL["c1_identity"], "norm": worst_norm <= TOL["c1_norm"]}
    return _finish(
        1, "rotation identity suite", checks, {"max_identity_error": worst_id, "max_norm_error": worst_norm},
        t0, TOL["c1_budget"],
    )


# -- 2 ---------------------------------------------------------------------------------


def criterion_2(ks=(20, 40, 80), r_bar: float = 0.5) -> CriterionResult:
    from .front_engine import front_residual, loglog_slope
    from .params import alpha_from_rbar

    t0 = time.perf_counter()
    alphas = [alpha_from_rbar(k, r_bar) for k in ks]
    res = front_residual(r_bar, alphas)
    dres = front_residual(r_bar, alphas, derivative=True)
    slope, dslope = loglog_slope(alphas, res), loglog_slope(alphas, dres)
    band = TOL["c2_slope_band"]
    checks = {
        "value_slope": abs(slope - TOL["c2_slope"]) <= band,
        "derivative_slope": abs(dslope - TOL["c2_slope"]) <= band,
    }
    metrics = {"alphas": alphas, "residual": res, "residual_ds": dres, "slope": slope, "slope_ds": dslope}
    return _finish(2, "series order three", checks, metrics, t0, TOL["c2_budget"])


# -- 3 ---------------------------------------------------------------------------------


def _radius_dev(front, target: float) -> dict:
    p = front.closed_curve()
    rad = np.hypot(p[:, 0], p[:, 1]) / front.alpha
    return {
        "min": float(rad.min()),
        "max": float(rad.max()),
        "mean": float(rad.mean()),
        "target": float(target),
        "max_rel_dev": float(np.abs(rad / target - 1.0).max()),
    }


def criterion_3(k: int = 20, r_bar: float = 0.5) -> CriterionResult:
    """Simple closed fronts, and every sample's M_alpha radius within 10%."""
    from .front_engine import extremal_front
    from .params import AlphaParam, alpha_from_c, alpha_from_rbar, alpha_r0

    t0 = time.perf_counter()
    checks, metrics = {}, {}
    ap = AlphaParam.from_alpha(alpha_from_rbar(k, r_bar))
    fr = extremal_front(ap, ap.k_max)
    dev = _radius_dev(fr, 2.0 * ap.remainder)
    checks["C1_kM_simple"] = fr.is_simple_closed
    checks["C1_kM_radius"] = dev["max_rel_dev"] <= TOL["c3_radius_rel"]
    metrics["C1_kM"] = dev
    for name, a in (("C1", alpha_from_rbar(k, r_bar)), ("C2", alpha_from_c(k, np.pi / 16)), ("C3", alpha_r0(k))):
        ap = AlphaParam.from_alpha(a)
        fr = extremal_front(ap, ap.k_max - 1)
        dev = _radius_dev(fr, 2.0 * (1.0 + ap.remainder))
        checks[f"{name}_kM-1_simple"] = fr.is_simple_closed
        checks[f"{name}_kM-1_radius"] = dev["max_rel_dev"] <= TOL["c3_radius_rel"]
        metrics[f"{name}_kM-1"] = dict(dev, alpha=a)
    return _finish(3, "front topology and radius", checks, metrics, t0, TOL["c3_budget"])


# -- 4 ---------------------------------------------------------------------------------


def criterion_4(n_locus: int = 500, n_probe: int = 100, seed: int = 0) -> CriterionResult:
    from . import oracle
    from .pendulum_synthesis import min_time, min_time_from_circle, overlap_locus_residual, overlap_point_from_sprime

    t0 = time.perf_counter()
    rho = 1.0
    origin_err = abs(min_time(0j, rho) - np.pi / 3)
    rng = np.random.default_rng(seed)
    sp = rng.uniform(np.pi, 2.0 * np.pi, n_locus)
    _, tpar, z = overlap_point_from_sprime(sp, rho)
    locus = float(np.max(np.abs([overlap_locus_residual(w, rho) for w in z])))
    worst_gap, worst_param, two = 0.0, 0.0, 0
    for w, tp in zip(z, tpar):
        recs = min_time_from_circle(w, rho)
        two += len(recs) == 2 and {r.family for r in recs} == {-1, 1}
        worst_gap = max(worst_gap, max(r.time for r in recs) - min(r.time for r in recs))
        worst_param = max(worst_param, abs(recs[0].time - tp))
    h = TOL["c4_h"]
    gm = oracle.pendulum_grid_oracle(rho, h, h)
    errs = oracle.pendulum_errors(gm, oracle.probe_points(rho, n_probe, seed))
    bound = TOL["c4_grid_factor"] * (h + h)
    checks = {
        "origin": origin_err <= TOL["c4_origin"],
        "locus": locus <= TOL["c4_locus"],
        "two_records": two == n_locus,
        "equal_times": worst_gap <= TOL["c4_times"],
        "grid_oracle": float(np.abs(errs).max()) <= bound,
    }
    metrics = {
        "origin_error": origin_err,
        "locus_residual": locus,
        "two_family_points": two,
        "time_gap": worst_gap,
        "param_time_error": worst_param,
        "oracle_max_error": float(np.abs(errs).max()),
        "oracle_bound": bound,
        "oracle_backend": gm.stats["backend"],
    }
    return _finish(4, "pendulum synthesis", checks, metrics, t0, TOL["c4_budget"])


# -- 5 ---------------------------------------------------------------------------------


def criterion_5(ks=(10, 20, 40), r_bar: float = 0.5) -> CriterionResult:
    from .cut_locus_solver import det_limit_closed_form, det_limit_map, gamma_o_alpha, limit_solution
    from .params import alpha_from_rbar

    t0 = time.perf_counter()
    hd, gaps = [], []
    for k in ks:
        c = gamma_o_alpha(alpha_from_rbar(k, r_bar))
        hd.append(c.hausdorff)
        gaps.append(len(c.gaps))
    ratios = [hd[i] / hd[i + 1] for i in range(len(hd) - 1)]
    det_err = 0.0
    for sp in np.linspace(np.pi + 0.02, 2 * np.pi - 0.02, 200):
        s, sp_, t = limit_solution(sp, r_bar)
        det_err = max(det_err, abs(det_limit_map(s, sp_, t, r_bar) - float(det_limit_closed_form(sp_, r_bar))))
    checks = {
        "strictly_decreasing": all(hd[i] > hd[i + 1] for i in range(len(hd) - 1)),
        "ratios": all(TOL["c5_ratio_lo"] <= q <= TOL["c5_ratio_hi"] for q in ratios),
        "no_gaps": sum(gaps) == 0,
        "det": det_err <= TOL["c5_det"],
    }
    metrics = {"k": list(ks), "hausdorff": hd, "ratios": ratios, "gaps": gaps, "det_error": det_err}
    return _finish(5, "cut locus convergence", checks, metrics, t0, TOL["c5_budget"])


# -- 6 ---------------------------------------------------------------------------------


def criterion_6(C: float = np.pi / 16, k: int = 30) -> CriterionResult:
    """k = 30 puts alpha_k = pi / (k + sqrt(k^2 + 2 pi C)) at pi/60.04."""
    from .extremal_flow import interior_duration
    from .limit_case_analysis import double_limit, double_points, jordan_restriction
    from .params import alpha_from_c

    t0 = time.perf_counter()
    (s1, s2), _ = double_limit(C)
    lim_err = max(abs(s1 - np.pi / 6), abs(s2 - 5 * np.pi / 6))
    a = alpha_from_c(k, C)
    dp = double_points(C, a)[0]
    v_err = abs(dp.s2 - (interior_duration(dp.s1, a) - dp.s1))
    jl = jordan_restriction(C)
    ja = jordan_restriction(C, a)
    checks = {
        "limit_doubles": lim_err <= TOL["c6_doubles"],
        "v_relation": v_err <= TOL["c6_v_relation"],
        "jordan_limit": jl.is_simple_closed,
        "jordan_alpha": ja.is_simple_closed,
    }
    metrics = {
        "alpha": a,
        "limit_error": lim_err,
        "s1": dp.s1,
        "s2": dp.s2,
        "double_residual": dp.residual,
        "v_relation_error": v_err,
    }
    return _finish(6, "regime C2 singular points", checks, metrics, t0, TOL["c6_budget"])


# -- 7 ---------------------------------------------------------------------------------


def criterion_7(ks=(20, 40, 80)) -> CriterionResult:
    from .limit_case_analysis import S_BAR, r0_switch_loss
    from .params import alpha_r0

    t0 = time.perf_counter()
    s = [r0_switch_loss(alpha_r0(k)) for k in ks]
    err = [abs(x - S_BAR) for x in s]
    ratios = [err[i] / err[i + 1] for i in range(len(err) - 1)]
    checks = {
        "ratios": all(TOL["c7_ratio_lo"] <= q <= TOL["c7_ratio_hi"] for q in ratios),
        "decreasing": all(err[i] > err[i + 1] for i in range(len(err) - 1)),
    }
    return _finish(
        7, "regime C3 switching loss", checks, {"k": list(ks), "s_alpha": s, "errors": err, "ratios": ratios},
        t0, TOL["c7_budget"],
    )


# -- 8 ---------------------------------------------------------------------------------


def criterion_8(k: int = 10, r_bar: float = 0.5, n_probe: int = 50, seed: int = 0) -> CriterionResult:
    from . import oracle
    from .cut_locus_solver import gamma_o_alpha, inside_sigma, sigma_radius
    from .params import alpha_from_rbar

    t0 = time.perf_counter()
    a = alpha_from_rbar(k, r_bar)
    h = TOL["c8_cell"]
    rmax = float(np.max(sigma_radius(np.linspace(0, 2 * np.pi, 721), a)))
    gm = oracle.sphere_family_oracle(a, oracle.CellBox.square(1.1 * rmax, h))
    probes = oracle.sphere_probe_points(a, n_probe, seed)
    c_center, at_arg = oracle.sphere_probe_errors(gm, probes, a)
    c = float(np.max(np.abs(c_center)))
    curve = gamma_o_alpha(a)
    cells = oracle.cells_on_polyline(gm, curve.points())
    # keep cells whose whole square lies inside sigma_alpha
    corners = (np.array([0, 1, 1j, 1 + 1j]) - 0.5 - 0.5j) * h * 1.0001
    inner = [ij for ij in cells if bool(np.all(inside_sigma(gm.center_of(*ij) + corners, a)))]
    flags = oracle.family_switch_cells(gm, inner)
    checks = {
        "c_finite": bool(np.isfinite(c)),
        "argmin_consistent": float(np.max(np.abs(at_arg))) <= TOL["c8_argmin"],
        "two_families": len(inner) > 0 and all(flags),
    }
    metrics = {
        "alpha": a,
        "cell": h,
        "c_measured": c,
        "c_signed_range": [float(c_center.min()), float(c_center.max())],
        "argmin_max_error": float(np.max(np.abs(at_arg))),
        "straddling_cells": len(inner),
        "two_family_cells": int(sum(flags)),
        "endpoints": gm.stats["endpoints"],
        "backend": gm.stats["backend"],
    }
    return _finish(8, "sphere oracle consistency", checks, metrics, t0, TOL["c8_budget"])


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_all(only=None):
    nums = sorted(CRITERIA) if not only else sorted(set(only))
    return [CRITERIA[n]() for n in nums]
