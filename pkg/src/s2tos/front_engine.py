"""Extremal fronts at times k pi and their expansion in alpha.

At T = k pi every extremal has switched exactly k times (or k - 1 times when
the first arc has length pi), so the front is the union of two branches
E^+(s), E^-(s), s in [0, pi], each a product of three rotations. The two
branches glue into a closed curve around the south pole.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extremal_flow import bang_chain, interior_duration, interior_duration_ds
from .params import AlphaParam
from .so3_kinematics import (
    NORTH,
    DomainError,
    bang_field,
    conjugate_params,
    mirror_x3,
    rot_apply,
    z_apply,
)
from . import _geom

N_SAMPLES = 2048
ANALYTIC_LIMIT = np.pi / 16

SIMPLE_CLOSED = "simple_closed"
SELF_INTERSECTING = "self_intersecting"


def _arc_lengths(alpha: float, k: int, s):
    """Durations of the k + 1 arcs reaching the front at k pi, and their s-derivatives."""
    s = np.asarray(s, dtype=float)
    v = interior_duration(s, alpha)
    dv = interior_duration_ds(s, alpha)
    last = k * np.pi - s - (k - 1) * v
    dur = np.stack([s] + [v] * (k - 1) + [last], axis=-1)
    ddur = np.stack([np.ones_like(s)] + [dv] * (k - 1) + [-1.0 - (k - 1) * dv], axis=-1)
    return dur, ddur


def front_point_closed(alpha: float, k: int, s, eps: int = 1):
    """Branch E^eps(alpha, k, s) from the three-rotation closed form."""
    s = np.asarray(s, dtype=float)
    v = interior_duration(s, alpha)
    theta, b, c = conjugate_params(v, alpha)
    x_eps, x_opp = bang_field(alpha, eps), bang_field(alpha, -eps)
    n = np.broadcast_to(NORTH, s.shape + (3,))
    p = rot_apply(x_eps, s, n)
    if k % 2 == 1:
        p = z_apply(-eps, b, c, 0.5 * (k - 1) * theta, p)
        return rot_apply(x_opp, k * np.pi - (k - 1) * v - s, p)
    p = z_apply(-eps, b, c, 0.5 * k * theta, p)
    return rot_apply(x_eps, k * (np.pi - v) - s, p)


def front_point(alpha: float, k: int, s, eps: int = 1):
    """Point (closed form) and exact s-tangent (derivative of the arc chain)."""
    p = front_point_closed(alpha, k, s, eps)
    dur, ddur = _arc_lengths(alpha, k, s)
    _, dp = bang_chain(alpha, eps, dur, ddur)
    return p, dp


def front_point_chain(alpha: float, k: int, s, eps: int = 1):
    dur, _ = _arc_lengths(alpha, k, s)
    return bang_chain(alpha, eps, dur)


@dataclass
class FrontCurve:
    alpha_param: AlphaParam
    k: int
    s: np.ndarray
    points_plus: np.ndarray
    tangents_plus: np.ndarray
    points_minus: np.ndarray
    tangents_minus: np.ndarray
    is_simple_closed: bool = False
    is_optimal: bool = False
    polar: dict = field(default_factory=dict)

    @property
    def alpha(self) -> float:
        return self.alpha_param.alpha

    @property
    def leading_sign(self) -> int:
        """Branch sign that runs first around the closed curve: + for odd k."""
        return 1 if self.k % 2 == 1 else -1

    def branch(self, eps: int):
        if eps > 0:
            return self.points_plus, self.tangents_plus
        return self.points_minus, self.tangents_minus

    def closed_curve(self) -> np.ndarray:
        """Sphere points of the closed front, leading branch then the other,
        with the shared gluing point kept once."""
        a, _ = self.branch(self.leading_sign)
        b, _ = self.branch(-self.leading_sign)
        return np.concatenate([a, b[1:]], axis=0)

    def glue_error(self) -> float:
        e1 = np.abs(self.points_plus[0] - self.points_minus[-1]).max()
        e2 = np.abs(self.points_minus[0] - self.points_plus[-1]).max()
        return float(max(e1, e2))

    def mirror_error(self) -> float:
        return float(np.abs(mirror_x3(self.points_plus, kind="point") - self.points_minus).max())

    def metadata(self) -> dict:
        return {
            "alpha": self.alpha,
            "r": self.alpha_param.remainder,
            "k": self.k,
            "is_simple_closed": bool(self.is_simple_closed),
            "is_optimal": bool(self.is_optimal),
        }

    def rows(self):
        """(branch, s, x1, x2, x3, t1, t2, t3) rows for export."""
        out = []
        for eps in (1, -1):
            pts, tan = self.branch(eps)
            for i, s in enumerate(self.s):
                out.append((eps, s, *pts[i], *tan[i]))
        return out


def check_front_index(ap: AlphaParam, k: int) -> None:
    if not (1 <= k <= ap.k_max):
        raise DomainError(f"k={k} outside [1, k_max={ap.k_max}]")
    if k > ap.n_mon:
        raise DomainError(f"k={k} exceeds n_mon={ap.n_mon}: switching times not monotone")


def extremal_front(ap: AlphaParam, k: int, n: int = N_SAMPLES, topology: bool = True) -> FrontCurve:
    """Sample both branches of the front at time k pi on a uniform s grid."""
    check_front_index(ap, k)
    s = np.linspace(0.0, np.pi, n)
    pp, tp = front_point(ap.alpha, k, s, 1)
    pm, tm = front_point(ap.alpha, k, s, -1)
    fc = FrontCurve(ap, k, s, pp, tp, pm, tm)
    if topology:
        verdict, polar = front_topology(fc)
        fc.is_simple_closed = verdict == SIMPLE_CLOSED
        fc.is_optimal = fc.is_simple_closed
        fc.polar = polar
    return fc


# -- the alpha expansion -----------------------------------------------------


def _psi_theta(alpha: float, r: float, s):
    v = interior_duration(s, alpha)
    dv = interior_duration_ds(s, alpha)
    a1 = np.pi / (2.0 * alpha) - r
    a2 = np.pi / (4.0 * alpha) - 0.5 * (1.0 + r)
    psi = a1 * (np.pi - v) + v - s
    dpsi = -a1 * dv + dv - 1.0
    return v, dv, psi, dpsi, a2


def chi(alpha: float, r: float, s, eps: int = 1):
    """chi^eps(alpha, r, s) = e^{psi X_-eps} e^{theta Z_-eps(v)} e^{s X_eps} N.

    With r = r(alpha) and odd k_max this is the front branch itself; for
    other r it is the analytic interpolation in which the series is taken.
    """
    s = np.asarray(s, dtype=float)
    v, _, psi, _, a2 = _psi_theta(alpha, r, s)
    big_theta, b, c = conjugate_params(v, alpha)
    n = np.broadcast_to(NORTH, s.shape + (3,))
    p = rot_apply(bang_field(alpha, eps), s, n)
    p = z_apply(-eps, b, c, a2 * big_theta, p)
    return rot_apply(bang_field(alpha, -eps), psi, p)


def _rodrigues_batch(zmat, ang):
    st = np.sin(ang)[..., None, None]
    ct = np.cos(ang)[..., None, None]
    return np.eye(3) + st * zmat + (1.0 - ct) * zmat @ zmat


def _zmat_batch(eps: int, b, c):
    n = np.shape(b)
    z = np.zeros(n + (3, 3))
    sg = -1.0 if eps > 0 else 1.0
    z[..., 0, 1] = -c
    z[..., 0, 2] = sg * b
    z[..., 1, 0] = c
    z[..., 2, 0] = -sg * b
    return z


def chi_ds(alpha: float, r: float, s, eps: int = 1):
    """Exact s-derivative of chi by the product rule on its three rotations."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    sa, ca = np.sin(alpha), np.cos(alpha)
    v, dv, psi, dpsi, a2 = _psi_theta(alpha, r, s)
    big_theta, b, c = conjugate_params(v, alpha)
    sh, ch = np.sin(v / 2.0), np.cos(v / 2.0)
    d = np.sqrt(sh * sh * sa * sa + ch * ch)
    dd = -sh * ch * ca * ca / (2.0 * d)
    db = sa * (0.5 * ch * d - sh * dd) / (d * d)
    dc = (0.5 * sh * d + ch * dd) / (d * d)
    w = sh * sh * np.cos(2.0 * alpha) - ch * ch
    dw = sh * ch * (1.0 + np.cos(2.0 * alpha))
    dtheta_dv = -2.0 * dw / np.sqrt(1.0 - w * w)
    ang = a2 * big_theta
    dang = a2 * dtheta_dv * dv

    x1 = bang_field(alpha, eps)
    x3 = bang_field(alpha, -eps)
    r1 = _rodrigues_batch(x1, s)
    z = _zmat_batch(-eps, b, c)
    dz = _zmat_batch(-eps, db * dv, dc * dv)
    r2 = _rodrigues_batch(z, ang)
    r3 = _rodrigues_batch(x3, psi)
    stt = np.sin(ang)[..., None, None]
    ctt = np.cos(ang)[..., None, None]
    dr1 = x1 @ r1
    dr2 = dang[..., None, None] * (z @ r2) + stt * dz + (1.0 - ctt) * (dz @ z + z @ dz)
    dr3 = dpsi[..., None, None] * (x3 @ r3)
    m = dr3 @ r2 @ r1 + r3 @ dr2 @ r1 + r3 @ r2 @ dr1
    return m @ NORTH


@dataclass(frozen=True)
class SeriesCoeffs:
    f0: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    eps: int
    parity: int

    def evaluate(self, alpha: float, terms: int = 3) -> np.ndarray:
        out = np.zeros_like(self.f1)
        for i, f in enumerate((self.f0, self.f1, self.f2)[:terms]):
            out = out + f * alpha**i
        return out


def _orient(v, eps: int, parity: int):
    flip = (eps < 0) != (parity % 2 == 0)
    if flip:
        v = v * np.array([-1.0, -1.0, 1.0])
    return v


def series_coeffs(s, r: float, eps: int = 1, parity: int = 1) -> SeriesCoeffs:
    """First three coefficients of the front in powers of alpha.

    For eps = -1 the coefficients are mirrored through the x3 axis; an even
    k flips the first two components again.
    """
    s = np.asarray(s, dtype=float)
    ss, cs = np.sin(s), np.cos(s)
    one = np.ones_like(s)
    f0 = np.stack([0.0 * one, 0.0 * one, -one], axis=-1)
    f1 = np.stack([-2.0 * r * cs, 2.0 * r * ss, 0.0 * one], axis=-1)
    f2 = np.stack(
        [
            0.5 * np.pi * (4.0 * r + cs) * ss * ss,
            0.25 * np.pi * (3.0 + 8.0 * r * cs + np.cos(2.0 * s)) * ss,
            2.0 * r * r * one,
        ],
        axis=-1,
    )
    return SeriesCoeffs(*(_orient(f, eps, parity) for f in (f0, f1, f2)), eps, parity)


def series_coeffs_ds(s, r: float, eps: int = 1, parity: int = 1) -> SeriesCoeffs:
    """s-derivatives of the series coefficients (f0 is constant)."""
    s = np.asarray(s, dtype=float)
    ss, cs = np.sin(s), np.cos(s)
    zero = np.zeros_like(s)
    g1 = np.stack([2.0 * r * ss, 2.0 * r * cs, zero], axis=-1)
    g2 = np.stack(
        [
            0.5 * np.pi * (-ss**3 + 2.0 * ss * cs * (4.0 * r + cs)),
            0.25
            * np.pi
            * ((-8.0 * r * ss - 2.0 * np.sin(2.0 * s)) * ss + (3.0 + 8.0 * r * cs + np.cos(2.0 * s)) * cs),
            zero,
        ],
        axis=-1,
    )
    g0 = np.stack([zero, zero, zero], axis=-1)
    return SeriesCoeffs(*(_orient(g, eps, parity) for g in (g0, g1, g2)), eps, parity)


def front_residual(r_bar: float, alphas, s_grid=None, terms: int = 3, derivative: bool = False):
    """Max over s of |chi^+(alpha, r_bar, s) - truncated series| for each alpha.

    ``terms`` counts the coefficients kept (1 keeps f0 only). With
    ``derivative`` the s-derivatives are compared instead.
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, np.pi, 513)
    s_grid = np.asarray(s_grid, dtype=float)
    out = []
    for a in alphas:
        if a > ANALYTIC_LIMIT:
            raise DomainError(f"alpha={a} above the analyticity threshold {ANALYTIC_LIMIT:.6g}")
        if derivative:
            val = chi_ds(a, r_bar, s_grid)
            ser = series_coeffs_ds(s_grid, r_bar).evaluate(a, terms)
        else:
            val = chi(a, r_bar, s_grid)
            ser = series_coeffs(s_grid, r_bar).evaluate(a, terms)
        out.append(float(np.linalg.norm(val - ser, axis=-1).max()))
    return np.array(out)


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)[0])


# -- topology ----------------------------------------------------------------


def front_topology(front: FrontCurve):
    """Polar-coordinate test of the projected closed front.

    The projection to (x1, x2) is a simple closed curve around the origin
    when its radius never vanishes and its polar angle is strictly
    monotone over both branches with total winding 2 pi. Differences are
    one-sided at the gluing parameters, where the tangent jumps.
    """
    pts = front.closed_curve()[:, :2]
    rho = np.hypot(pts[:, 0], pts[:, 1])
    beta = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    db = np.diff(beta)
    info = {
        "rho_min": float(rho.min()),
        "beta_total": float(beta[-1] - beta[0]),
        "monotone": bool(np.all(db > 0) or np.all(db < 0)),
        "crossings": None,
    }
    if rho.min() <= 0.0:
        info["pole_hit"] = True
        return SELF_INTERSECTING, info
    ok = info["monotone"] and abs(abs(info["beta_total"]) - 2.0 * np.pi) < 1e-6
    if not ok:
        info["crossings"] = _geom.self_intersections(pts, closed=True, limit=8)
    return (SIMPLE_CLOSED if ok else SELF_INTERSECTING), info


def rescale(p, alpha: float, power: int = 1) -> np.ndarray:
    """M_alpha (power 1) or N_alpha (power 2): (x1, x2) / alpha^power."""
    if power not in (1, 2):
        raise DomainError("power must be 1 or 2")
    p = np.asarray(p, dtype=float)
    return p[..., :2] / alpha**power
