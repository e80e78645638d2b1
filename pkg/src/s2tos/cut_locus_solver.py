"""Overlap curve of the rescaled sphere problem near the south pole.

After the dilation M_alpha the optimal front at time k_max pi becomes a
closed curve sigma_alpha close to the circle of radius 2 r. Points inside
are reached by one more bang arc, and the two families meet on the overlap
curve gamma_o_alpha. It is traced by Newton continuation on

    Phi(s', t; s) = M(e^{t X+} sigma(s')) - M(e^{t X-} sigma(s)) = 0,

for s in (0, pi), s' in (pi, 2 pi), t in (0, pi). Flows are exact sphere
rotations, so there is no integration error.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import _geom
from .front_engine import SIMPLE_CLOSED, extremal_front, front_point, front_topology
from .params import AlphaParam
from .pendulum_synthesis import overlap_point, pen_flow
from .so3_kinematics import DomainError, bang_field, rot_apply

NEWTON_TOL = 1e-10
NEWTON_MAXIT = 25
STEP_NOMINAL = 1e-2
STEP_FLOOR = 1e-5
CORNER_MAX = 0.1
I_DEFAULT = (0.05, np.pi - 0.05)


# -- rescaled flow -------------------------------------------------------------


def lift(z, alpha: float) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r2 = (alpha * np.abs(z)) ** 2
    if np.any(r2 >= 1.0):
        raise DomainError("point outside the chart alpha |z| < 1")
    return np.stack([alpha * z.real, alpha * z.imag, -np.sqrt(1.0 - r2)], axis=-1)


def project(p, alpha: float):
    p = np.asarray(p, dtype=float)
    return (p[..., 0] + 1j * p[..., 1]) / alpha


def rescaled_flow(z, eps: int, t, alpha: float):
    """Lift to the southern hemisphere, rotate by e^{t X_eps}, dilate back."""
    return project(rot_apply(bang_field(alpha, eps), t, lift(z, alpha)), alpha)


def rescaled_field(z: complex, eps: int, alpha: float) -> complex:
    """The planar vector field of the dilated system at z."""
    q = np.sqrt(1.0 - alpha * alpha * abs(z) ** 2)
    return complex(-np.cos(alpha) * z.imag, np.cos(alpha) * z.real + eps * np.sin(alpha) / alpha * q)


# -- sigma_alpha ---------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _optimal_front_check(alpha: float) -> bool:
    ap = AlphaParam.from_alpha(alpha)
    verdict, _ = front_topology(extremal_front(ap, ap.k_max, topology=False))
    return verdict == SIMPLE_CLOSED


def sigma_sphere(s, alpha: float, check: bool = True):
    """Sphere points and s-tangents of the closed front at k_max pi.

    s in [0, pi] runs along the leading branch, s in (pi, 2 pi] along the
    other one shifted by pi.
    """
    ap = AlphaParam.from_alpha(alpha)
    if check and not _optimal_front_check(alpha):
        raise DomainError("front at k_max pi is not a simple closed curve: not in the C1 regime")
    s = np.asarray(s, dtype=float)
    b = ap.leading_sign
    first = s <= np.pi
    p1, d1 = front_point(alpha, ap.k_max, np.where(first, s, s - np.pi), b)
    p2, d2 = front_point(alpha, ap.k_max, np.where(first, s, s - np.pi), -b)
    sel = first[..., None]
    return np.where(sel, p1, p2), np.where(sel, d1, d2)


def sigma_alpha(s, alpha: float, check: bool = True):
    """sigma_alpha(s) in the dilated plane, as complex numbers."""
    p, _ = sigma_sphere(s, alpha, check)
    return project(p, alpha)


def sigma_limit(s, r_bar: float):
    return 2.0 * r_bar * np.exp(1j * (np.pi - np.asarray(s, dtype=float)))


# -- the meeting map -------------------------------------------------------------


@dataclass
class OverlapSolution:
    s: float
    s_prime: float
    t: float
    point: complex
    newton_iters: int
    residual: float
    cond: float = float("nan")


def _phi_and_jac(alpha: float, s: float, sp: float, t: float, ps=None):
    xp, xm = bang_field(alpha, 1), bang_field(alpha, -1)
    if ps is None:
        ps, _ = sigma_sphere(s, alpha, check=False)
    pp, dpp = sigma_sphere(sp, alpha, check=False)
    a = rot_apply(xp, t, pp)
    b = rot_apply(xm, t, ps)
    f = project(a, alpha) - project(b, alpha)
    col_sp = project(rot_apply(xp, t, dpp), alpha)
    col_t = project(xp @ a, alpha) - project(xm @ b, alpha)
    jac = np.array([[col_sp.real, col_t.real], [col_sp.imag, col_t.imag]])
    return complex(f), jac, b


def meeting_map(alpha: float, s: float, sp: float, t: float) -> complex:
    return _phi_and_jac(alpha, s, sp, t)[0]


def jacobian_det(alpha: float, s: float, sp: float, t: float) -> float:
    return float(np.linalg.det(_phi_and_jac(alpha, s, sp, t)[1]))


def solve_overlap(s: float, alpha: float, seed, tol: float = NEWTON_TOL, maxit: int = NEWTON_MAXIT):
    """Newton on (s', t) for Phi = 0 at fixed s; None when it does not converge."""
    sp, t = float(seed[0]), float(seed[1])
    ps, _ = sigma_sphere(s, alpha, check=False)
    for it in range(maxit + 1):
        f, jac, b = _phi_and_jac(alpha, s, sp, t, ps)
        res = abs(f)
        if not np.isfinite(res):
            return None
        if res <= tol:
            if not (np.pi < sp < 2 * np.pi and 0.0 < t < np.pi):
                return None
            return OverlapSolution(
                s, sp, t, complex(project(b, alpha)), it, float(res), float(np.linalg.cond(jac))
            )
        if it == maxit:
            return None
        try:
            d = np.linalg.solve(jac, [f.real, f.imag])
        except np.linalg.LinAlgError:
            return None
        sp -= d[0]
        t -= d[1]
    return None


def corner_asymptotics(s: float, r_bar: float, corner: str = "zero"):
    """Leading-order seed (s', t) near the corners of the overlap curve.

    Near s = 0 (s' near 2 pi): s' - 2 pi = -(1 - r)/(1 + r) s, t = 2r/(1 + r) s.
    Near s = pi with a = pi - s: s' - pi = (1 + r)/(1 - r) a, t = 2r/(1 - r) a.
    """
    r = r_bar
    if corner == "zero":
        return 2.0 * np.pi - (1.0 - r) / (1.0 + r) * s, 2.0 * r / (1.0 + r) * s
    if corner == "pi":
        a = np.pi - s
        return np.pi + (1.0 + r) / (1.0 - r) * a, 2.0 * r / (1.0 - r) * a
    raise ValueError("corner must be 'zero' or 'pi'")


@dataclass
class OverlapCurve:
    alpha: float
    r_bar: float
    solutions: list
    gaps: list = field(default_factory=list)
    endpoints: tuple = ()
    hausdorff: float = float("nan")

    def points(self) -> np.ndarray:
        return np.array([sol.point for sol in self.solutions])

    def polyline(self) -> np.ndarray:
        z = [self.endpoints[0]] + [sol.point for sol in self.solutions] + [self.endpoints[1]]
        z = np.array(z)
        return np.column_stack([z.real, z.imag])

    def rows(self):
        return [
            (o.s, o.s_prime, o.t, o.point.real, o.point.imag, o.residual, o.newton_iters)
            for o in self.solutions
        ]


def _continue(alpha, s_from, s_to, prev, prev2, step):
    """Advance from s_from to s_to, halving the step on Newton failure."""
    s_cur = s_from
    h = min(step, abs(s_to - s_from))
    direction = 1.0 if s_to > s_from else -1.0
    while abs(s_to - s_cur) > 1e-15:
        h = min(h, abs(s_to - s_cur))
        s_new = s_cur + direction * h
        if prev2 is not None and prev2.s != prev.s:
            w = (s_new - prev.s) / (prev.s - prev2.s)
            seed = (prev.s_prime + w * (prev.s_prime - prev2.s_prime), prev.t + w * (prev.t - prev2.t))
        else:
            seed = (prev.s_prime, prev.t)
        sol = solve_overlap(s_new, alpha, seed)
        if sol is None:
            h *= 0.5
            if h < STEP_FLOOR:
                return None, prev, prev2
            continue
        prev2, prev = prev, sol
        s_cur = s_new
        h = min(2.0 * h, step)
    return prev, prev, prev2


def gamma_o_alpha(alpha: float, s_grid=None, r_bar: float | None = None, step: float = STEP_NOMINAL):
    """Trace the overlap curve over s_grid and measure its distance to the limit.

    The sweep starts at the first grid point from the corner seed and
    continues monotonically. Failed grid points are recorded in ``gaps`` and
    not interpolated.
    """
    ap = AlphaParam.from_alpha(alpha)
    if r_bar is None:
        r_bar = ap.remainder
    if not (0.0 < r_bar < 1.0):
        raise DomainError("overlap curve needs a remainder inside (0, 1)")
    if not _optimal_front_check(alpha):
        raise DomainError("front at k_max pi is not a simple closed curve: not in the C1 regime")
    if s_grid is None:
        s_grid = np.linspace(I_DEFAULT[0], I_DEFAULT[1], 157)
    s_grid = np.sort(np.asarray(s_grid, dtype=float))
    first = solve_overlap(s_grid[0], alpha, corner_asymptotics(s_grid[0], r_bar, "zero"))
    if first is None:
        raise RuntimeError(f"Newton failed from the corner seed at s={s_grid[0]}")
    sols, gaps = [first], []
    prev, prev2 = first, None
    for s_next in s_grid[1:]:
        sol, prev, prev2 = _continue(alpha, prev.s, s_next, prev, prev2, step)
        if sol is None:
            gaps.append(float(s_next))
            continue
        sols.append(sol)
    ends = (complex(sigma_alpha(0.0, alpha)), complex(sigma_alpha(np.pi, alpha)))
    curve = OverlapCurve(alpha, r_bar, sols, gaps, ends)
    curve.hausdorff = _geom.hausdorff(curve.polyline(), gamma_pen_polyline(r_bar))
    return curve


def gamma_pen_polyline(r_bar: float, n: int = 4001) -> np.ndarray:
    s = np.linspace(0.0, np.pi, n)
    z, _ = overlap_point(s, 2.0 * r_bar)
    return np.column_stack([z.real, z.imag])


# -- limit Jacobian ----------------------------------------------------------------


def det_limit_closed_form(s_prime, r_bar: float):
    s_prime = np.asarray(s_prime, dtype=float)
    r = r_bar
    return 4 * r * (1 - r * r) * np.sin(s_prime) / ((1 - r * np.cos(s_prime)) ** 2 + (r * np.sin(s_prime)) ** 2)


def det_limit_map(s: float, s_prime: float, t: float, r_bar: float) -> float:
    """det of d(Phi_pen)/d(s', t) for the planar limit map."""
    rho = 2.0 * r_bar
    sig_p = -rho * np.exp(-1j * s_prime)
    sig = -rho * np.exp(-1j * s)
    e = np.exp(1j * t)
    a = 1j * rho * np.exp(-1j * s_prime) * e
    b = 1j * (sig_p + 1.0) * e - 1j * (sig - 1.0) * e
    return float((np.conj(a) * b).imag)


def limit_solution(s_prime: float, r_bar: float):
    """(s, s', t) on the limit overlap set, from the u=+1 angle s'."""
    from .pendulum_synthesis import overlap_point_from_sprime

    s, t, _ = overlap_point_from_sprime(s_prime, 2.0 * r_bar)
    return float(s), float(s_prime), float(t)


def limit_meeting_error(s: float, s_prime: float, t: float, r_bar: float) -> float:
    rho = 2.0 * r_bar
    return abs(pen_flow(-rho * np.exp(-1j * s_prime), 1, t) - pen_flow(-rho * np.exp(-1j * s), -1, t))


def corner_taylor(alpha: float, h: float = 1e-4, corner: str = "zero"):
    """Finite-difference Taylor data of the exact meeting map at a corner.

    Variables are (s, s~, t) with s~ = s' - 2 pi at the s = 0 corner. At the
    s = pi corner the deviations are (s - pi, s' - pi, t).
    """
    base = (0.0, 2.0 * np.pi, 0.0) if corner == "zero" else (np.pi, np.pi, 0.0)

    def phi(x):
        s, sp, t = base[0] + x[0], base[1] + x[1], base[2] + x[2]
        s = s % (2.0 * np.pi)
        sp = sp if sp <= 2.0 * np.pi else sp - 2.0 * np.pi
        ps, _ = sigma_sphere(s, alpha, check=False)
        pp, _ = sigma_sphere(sp, alpha, check=False)
        f = project(rot_apply(bang_field(alpha, 1), t, pp), alpha) - project(
            rot_apply(bang_field(alpha, -1), t, ps), alpha
        )
        return np.array([f.real, f.imag])

    e = np.eye(3) * h
    grad = np.array([(phi(e[i]) - phi(-e[i])) / (2 * h) for i in range(3)]).T
    hess = np.zeros((2, 3, 3))
    f0 = phi(np.zeros(3))
    for i in range(3):
        for j in range(3):
            if i == j:
                hess[:, i, i] = (phi(e[i]) - 2 * f0 + phi(-e[i])) / h**2
            else:
                hess[:, i, j] = (
                    phi(e[i] + e[j]) - phi(e[i] - e[j]) - phi(-e[i] + e[j]) + phi(-e[i] - e[j])
                ) / (4 * h * h)
    return f0, grad, hess


# -- interior synthesis time ---------------------------------------------------------

N_POLAR = 8192
N_EXIT_SCAN = 400


@functools.lru_cache(maxsize=16)
def _polar_table(alpha: float):
    s = np.linspace(0.0, 2.0 * np.pi, N_POLAR, endpoint=False)
    z = sigma_alpha(s, alpha)
    beta = np.mod(np.angle(z), 2.0 * np.pi)
    order = np.argsort(beta)
    return beta[order], np.abs(z)[order]


def sigma_radius(beta, alpha: float):
    """Polar radius of sigma_alpha at angle beta (star-shaped in regime C1)."""
    b, r = _polar_table(alpha)
    return np.interp(np.mod(beta, 2.0 * np.pi), b, r, period=2.0 * np.pi)


def inside_sigma(z, alpha: float):
    z = np.asarray(z, dtype=complex)
    return np.abs(z) < sigma_radius(np.angle(z), alpha)


def exit_time(z: complex, eps: int, alpha: float, t_max: float = np.pi) -> float:
    """First tau with e^{-tau X_eps} z on sigma_alpha, by scan plus brentq."""
    from scipy.optimize import brentq

    def g(tau):
        w = complex(rescaled_flow(z, eps, -tau, alpha))
        return abs(w) - float(sigma_radius(np.angle(w), alpha))

    if g(0.0) >= 0.0:
        return 0.0
    taus = np.linspace(0.0, t_max, N_EXIT_SCAN + 1)
    w = rescaled_flow(np.full(taus.shape, complex(z)), eps, -taus, alpha)
    vals = np.abs(w) - sigma_radius(np.angle(w), alpha)
    idx = np.nonzero(vals >= 0.0)[0]
    if len(idx) == 0:
        return np.inf
    i = int(idx[0])
    return float(brentq(g, taus[i - 1], taus[i], xtol=1e-13))


def interior_time(z: complex, alpha: float):
    """Minimum time to a point inside sigma_alpha: k_max pi plus one bang arc.

    Returns (time, family, (time_minus, time_plus)); family 0 flags a tie
    within 1e-9.
    """
    ap = AlphaParam.from_alpha(alpha)
    if not inside_sigma(z, alpha):
        raise DomainError("point is not inside the front at k_max pi")
    tm = exit_time(z, -1, alpha)
    tp = exit_time(z, 1, alpha)
    base = ap.k_max * np.pi
    fam = 0 if abs(tm - tp) <= 1e-9 else (-1 if tm < tp else 1)
    return base + min(tm, tp), fam, (base + tm, base + tp)
