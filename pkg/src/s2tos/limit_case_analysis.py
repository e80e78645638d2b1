"""Regimes with vanishing remainder: r = C alpha (C2) and r = 0 (C3).

In C2 the front at k_max pi, dilated by N_alpha (1 / alpha^2), converges to
the planar curve L(s). For C < pi/4 it has four cusps and two double
points, and the optimal front is its Jordan restriction. The overlap curve
becomes the segment [-2C, 2C] of the z1 axis. In C3 the switching curve
C+_{k_max} stops being optimal at s(alpha) -> arccos(sqrt(1/3)).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _geom
from .cut_locus_solver import sigma_sphere
from .extremal_flow import interior_duration, switching_curve_points
from .params import INT_SNAP, AlphaParam
from .so3_kinematics import DomainError, bang_field

C_WALL = np.pi / 4
WALL_TOL = 1e-12
NEWTON_TOL = 1e-12
NEWTON_MAXIT = 30
STEP_TOL = 1e-13
# Rounding in the k-arc product is amplified by the 1/alpha^2 dilation; the
# Newton residual cannot go below roughly k eps / alpha^2.
DP_FAIL = 1e-7
S_BAR = float(np.arccos(np.sqrt(1.0 / 3.0)))


def _wall_check(C: float) -> None:
    if C <= 0.0:
        raise DomainError("C must be positive")
    if abs(C - C_WALL) <= WALL_TOL:
        raise DomainError("C = pi/4 is the bifurcation value; refusing to pick a side")


def l_curve(s, C: float):
    """L(s) = (cos s (-2C + pi sin^2 s / 2), sin s (pi + 2C - pi sin^2 s / 2))."""
    s = np.asarray(s, dtype=float)
    ss, cs = np.sin(s), np.cos(s)
    return cs * (-2 * C + 0.5 * np.pi * ss * ss) + 1j * ss * (np.pi + 2 * C - 0.5 * np.pi * ss * ss)


def l_curve_ds(s, C: float):
    s = np.asarray(s, dtype=float)
    ss, cs = np.sin(s), np.cos(s)
    x = -ss * (-2 * C + 0.5 * np.pi * ss * ss) + np.pi * cs * cs * ss
    y = cs * (np.pi + 2 * C - 0.5 * np.pi * ss * ss) - np.pi * ss * ss * cs
    return x + 1j * y


def l_alpha(s, alpha: float):
    """N_alpha of the closed front at k_max pi, and its s-derivative."""
    p, dp = sigma_sphere(s, alpha, check=False)
    a2 = alpha * alpha
    return (p[..., 0] + 1j * p[..., 1]) / a2, (dp[..., 0] + 1j * dp[..., 1]) / a2


def c_of(alpha: float) -> float:
    return AlphaParam.from_alpha(alpha).remainder / alpha


# -- cusps ----------------------------------------------------------------------


def cusp_limit(C: float):
    """Parameters where sin^2 s = (2 + 4C/pi)/3; empty for C >= pi/4."""
    _wall_check(C)
    q = (2.0 + 4.0 * C / np.pi) / 3.0
    if q >= 1.0:
        return []
    a = float(np.arcsin(np.sqrt(q)))
    return [a, np.pi - a, np.pi + a, 2 * np.pi - a]


@dataclass
class Cusp:
    s: float
    point: complex
    speed: float
    s_limit: float


def cusp_points(C: float, alpha: float | None = None, window: float = 0.15):
    """Cusps of L (alpha None) or of L_alpha.

    For alpha > 0 the tangent near a limit cusp is close to (s - s_c) w with
    w the direction of the second derivative; the root of <L', w> is found
    by bracketing around the limit value and the residual speed |L'| is
    reported.
    """
    seeds = cusp_limit(C)
    out = []
    for sc in seeds:
        if alpha is None:
            out.append(Cusp(sc, complex(l_curve(sc, C)), float(abs(l_curve_ds(sc, C))), sc))
            continue
        h = 1e-4
        w = complex(l_alpha(sc + h, alpha)[1] - l_alpha(sc - h, alpha)[1])
        w /= abs(w)

        def g(s, w=w):
            return float((np.conj(w) * l_alpha(s, alpha)[1]).real)

        grid = np.linspace(sc - window, sc + window, 301)
        vals = (np.conj(w) * l_alpha(grid, alpha)[1]).real
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
        if len(idx) == 0:
            raise RuntimeError(f"no cusp found near s={sc}")
        i = idx[np.argmin(np.abs(grid[idx] - sc))]
        s = brentq(g, grid[i], grid[i + 1], xtol=1e-15)
        z, dz = l_alpha(s, alpha)
        out.append(Cusp(float(s), complex(z), float(abs(dz)), sc))
    return out


# -- double points -----------------------------------------------------------------


def double_limit(C: float):
    """Limit pairs (theta_d, pi - theta_d) and (pi + theta_d, 2 pi - theta_d)."""
    _wall_check(C)
    if C >= C_WALL:
        return []
    th = float(np.arcsin(2.0 * np.sqrt(C / np.pi)))
    return [(th, np.pi - th), (np.pi + th, 2 * np.pi - th)]


@dataclass
class DoublePoint:
    s1: float
    s2: float
    point: complex
    residual: float
    newton_iters: int


def double_points(C: float, alpha: float | None = None):
    """Double points of L or L_alpha, by Newton on L(s1) - L(s2) = 0."""
    out = []
    for s1, s2 in double_limit(C):
        if alpha is None:
            z = complex(l_curve(s1, C))
            out.append(DoublePoint(s1, s2, z, float(abs(z - l_curve(s2, C))), 0))
            continue
        best = None
        for it in range(NEWTON_MAXIT + 1):
            z1, d1 = l_alpha(s1, alpha)
            z2, d2 = l_alpha(s2, alpha)
            f = complex(z1 - z2)
            if best is None or abs(f) < best[3]:
                best = (s1, s2, complex(z1), abs(f), it)
            if abs(f) <= NEWTON_TOL or it == NEWTON_MAXIT:
                break
            jac = np.array([[d1.real, -d2.real], [d1.imag, -d2.imag]])
            d = np.linalg.solve(jac, [f.real, f.imag])
            if np.max(np.abs(d)) <= STEP_TOL:
                break
            s1, s2 = s1 - d[0], s2 - d[1]
        s1, s2, z1, res, it = best
        if res > DP_FAIL:
            raise RuntimeError("double point Newton did not converge")
        out.append(DoublePoint(float(s1), float(s2), z1, float(res), it))
    return out


# -- Jordan restriction and segment overlap -------------------------------------------


@dataclass
class JordanRestriction:
    C: float
    s: np.ndarray
    points: np.ndarray
    is_simple_closed: bool
    optimal_front: bool
    junction_error: float = 0.0
    doubles: list = field(default_factory=list)


def jordan_restriction(C: float, alpha: float | None = None, n: int = 4000) -> JordanRestriction:
    """The part of L (or L_alpha) that is the minimum time front.

    For C > pi/4 this is the whole curve. Otherwise the loops between the
    two halves of each double point are cut out and the remaining pieces
    [0, s1+] u [s2+, s1-] u [s2-, 2 pi] are joined at the double points.
    """
    _wall_check(C)

    def curve(s):
        return l_curve(s, C) if alpha is None else l_alpha(s, alpha)[0]

    if C > C_WALL:
        s = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        pts = curve(s)
        xy = np.column_stack([pts.real, pts.imag])
        return JordanRestriction(C, s, pts, _geom.is_simple(xy, closed=True), True)
    dps = double_points(C, alpha)
    (a1, a2), (b1, b2) = (dps[0].s1, dps[0].s2), (dps[1].s1, dps[1].s2)
    # D+ is kept once as L(s1+); the removed loops are (s1+, s2+] and (s1-, s2-].
    pieces = [(0.0, a1, True), (a2, b1, True), (b2, 2 * np.pi, False)]
    total = sum(hi - lo for lo, hi, _ in pieces)
    s_parts = []
    for lo, hi, incl in pieces:
        m = max(8, int(round(n * (hi - lo) / total)))
        grid = np.linspace(lo, hi, m + 1, endpoint=incl)
        s_parts.append(grid if lo == 0.0 else grid[1:])
    s = np.concatenate(s_parts)
    pts = curve(s)
    xy = np.column_stack([pts.real, pts.imag])
    junction = max(abs(complex(curve(d.s1)) - complex(curve(d.s2))) for d in dps)
    return JordanRestriction(C, s, pts, _geom.is_simple(xy, closed=True), True, float(junction), dps)


@dataclass
class SegmentOverlap:
    C: float
    endpoints: tuple
    origin_sources: list

    def feedback(self, z: complex) -> int:
        """Limit control: -1 above the segment, +1 below."""
        return -1 if complex(z).imag > 0 else 1


def seg_overlap(C: float) -> SegmentOverlap:
    """Segment [-2C, 2C] x {0} and the limit-optimal sources of the origin.

    Integral curves of the limit system are vertical (dz1 = 0, dz2 = u), so
    the origin is reached from the points of the optimal front on the z2
    axis: the double points when C < pi/4, L(pi/2) and L(3 pi/2) otherwise.
    """
    _wall_check(C)
    ends = (complex(-2 * C, 0.0), complex(2 * C, 0.0))
    if C < C_WALL:
        srcs = [complex(d.point) for d in double_points(C)]
    else:
        srcs = [complex(l_curve(np.pi / 2, C)), complex(l_curve(1.5 * np.pi, C))]
    return SegmentOverlap(C, ends, srcs)


# -- r = 0 -------------------------------------------------------------------------------


def switch_loss_function(s, alpha: float):
    """H(s) = det(X+ C(s), C'(s), C(s)) along C+_{k_max}."""
    ap = AlphaParam.from_alpha(alpha)
    p, dp, _ = switching_curve_points(ap.k_max, 1, s, alpha)
    xp = p @ bang_field(alpha, 1).T
    return np.einsum("...i,...i->...", np.cross(xp, dp), p)


def r0_switch_loss(alpha: float, n_scan: int = 4000) -> float:
    """Smallest zero of H on (0, pi), by sign scan plus bisection."""
    ap = AlphaParam.from_alpha(alpha)
    if ap.remainder > INT_SNAP or ap.k_max < 5:
        raise DomainError("alpha must equal pi/(2k) with k >= 5")
    grid = np.linspace(1e-6, np.pi - 1e-6, n_scan)
    vals = switch_loss_function(grid, alpha)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(idx) == 0:
        raise DomainError("H has no sign change on (0, pi): not in the r = 0 regime")
    i = int(idx[0])
    return float(brentq(lambda s: float(switch_loss_function(s, alpha)), grid[i], grid[i + 1], xtol=1e-15))


def switch_loss_leading(s, alpha: float):
    """Leading-order model (pi/4) sin s alpha^3 (1 + 3 cos 2s)."""
    s = np.asarray(s, dtype=float)
    return 0.25 * np.pi * np.sin(s) * alpha**3 * (1.0 + 3.0 * np.cos(2 * s))


# -- classification ---------------------------------------------------------------------


C2_MAX = 2.0


@dataclass
class CaseReport:
    regime: str
    alpha: float
    k_max: int
    remainder: float
    C: float | None = None
    r_bar: float | None = None
    overlap_endpoints: list | None = None
    hausdorff: float | None = None
    cusps: list | None = None
    doubles: list | None = None
    segment: list | None = None
    s_alpha: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _xy(z: complex):
    return [float(z.real), float(z.imag)]


def regime_of(alpha: float, hint: str | None = None) -> str:
    """C1, C2 or C3. ``hint`` comes from the way alpha was specified; a
    bare alpha is C3 when r = 0, C2 when r / alpha <= C2_MAX, else C1."""
    if hint is not None:
        return hint
    ap = AlphaParam.from_alpha(alpha)
    if ap.remainder <= INT_SNAP:
        return "C3"
    return "C2" if ap.remainder / alpha <= C2_MAX else "C1"


def classify(alpha: float, hint: str | None = None) -> CaseReport:
    from .cut_locus_solver import gamma_o_alpha

    ap = AlphaParam.from_alpha(alpha)
    regime = regime_of(alpha, hint)
    rep = CaseReport(regime, alpha, ap.k_max, ap.remainder)
    if regime == "C1":
        curve = gamma_o_alpha(alpha)
        rep.r_bar = ap.remainder
        rep.overlap_endpoints = [_xy(z) for z in curve.endpoints]
        rep.hausdorff = curve.hausdorff
    elif regime == "C2":
        C = ap.remainder / alpha
        rep.C = C
        if C < C_WALL:
            rep.cusps = [{"s": c.s, "point": _xy(c.point), "speed": c.speed} for c in cusp_points(C, alpha)]
            rep.doubles = [
                {"s1": d.s1, "s2": d.s2, "point": _xy(d.point), "v_check": float(interior_duration(d.s1, alpha) - d.s1 - d.s2)}
                for d in double_points(C, alpha)
            ]
            # second pair is shifted by pi on the other branch
            rep.doubles[1]["v_check"] = float(
                interior_duration(rep.doubles[1]["s1"] - np.pi, alpha) - rep.doubles[1]["s1"] - rep.doubles[1]["s2"] + 2 * np.pi
            )
        else:
            rep.cusps, rep.doubles = [], []
        rep.segment = [_xy(z) for z in seg_overlap(C).endpoints]
    elif regime == "C3":
        rep.s_alpha = r0_switch_loss(alpha)
    else:
        raise DomainError(f"unknown regime {regime}")
    return rep
