"""Bang-bang extremals from the north pole.

An extremal starts at N with a bang arc of length s_i in (0, pi], continues
with arcs of the common interior duration v(s_i) and ends with a last arc
of length s_f <= v(s_i). Switching curves C_k^eps collect the points where
extremals switch for the k-th time; their tangents are computed exactly by
propagating the derivative through the product of exponentials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .params import AlphaParam
from .so3_kinematics import NORTH, DomainError, bang_field, rot_apply

LOCALLY_OPTIMAL = "locally_optimal"
CONJUGATE_POINT = "conjugate_point"
REFLECTING = "reflecting"

ZERO_COEFF_TOL = 1e-9
S_DELTA = 1e-6


def _cot2(alpha: float) -> float:
    return 1.0 / np.tan(alpha) ** 2


def interior_duration(s, alpha: float):
    """v(s) = pi + 2 arctan(sin s / (cos s + cot^2 alpha))."""
    s = np.asarray(s, dtype=float)
    out = np.pi + 2.0 * np.arctan(np.sin(s) / (np.cos(s) + _cot2(alpha)))
    return out if out.ndim else float(out)


def interior_duration_ds(s, alpha: float):
    """dv/ds = 2(1 + K cos s)/(1 + 2K cos s + K^2), K = cot^2 alpha."""
    s = np.asarray(s, dtype=float)
    k2 = _cot2(alpha)
    c = np.cos(s)
    out = 2.0 * (1.0 + k2 * c) / (1.0 + 2.0 * k2 * c + k2 * k2)
    return out if out.ndim else float(out)


def switch_time_derivative(k: int, s, alpha: float):
    """dT_k/ds for T_k(s) = s + k v(s), as a single fraction."""
    s = np.asarray(s, dtype=float)
    k2 = _cot2(alpha)
    c = np.cos(s)
    den = 1.0 + 2.0 * c * k2 + k2 * k2
    out = (den + k * (2.0 + 2.0 * c * k2)) / den
    return out if out.ndim else float(out)


def switch_time(k: int, s, alpha: float):
    return np.asarray(s, dtype=float) + k * interior_duration(s, alpha)


def bang_chain(alpha: float, eps_first: int, durations, d_durations=None, start=NORTH):
    """Endpoint of alternating bang arcs starting with sign ``eps_first``.

    ``durations`` has shape ``(..., n)``; arc j uses sign eps_first (-1)^j.
    When ``d_durations`` (same shape, derivatives of the durations with
    respect to a parameter) is given, the derivative of the endpoint is
    returned as well.
    """
    durations = np.asarray(durations, dtype=float)
    fields = {1: bang_field(alpha, 1), -1: bang_field(alpha, -1)}
    p = np.broadcast_to(np.asarray(start, dtype=float), durations.shape[:-1] + (3,)).copy()
    dp = np.zeros_like(p) if d_durations is not None else None
    sgn = 1 if eps_first > 0 else -1
    for j in range(durations.shape[-1]):
        y = fields[sgn]
        t = durations[..., j]
        p = rot_apply(y, t, p)
        if dp is not None:
            dp = rot_apply(y, t, dp) + np.asarray(d_durations)[..., j, None] * (p @ y.T)
        sgn = -sgn
    return (p, dp) if dp is not None else p


@dataclass(frozen=True)
class BangSequence:
    eps_first: int
    s_i: float
    n_arcs: int
    s_f: float = 0.0

    def durations(self, alpha: float) -> np.ndarray:
        if self.n_arcs == 1:
            return np.array([self.s_i])
        v = interior_duration(self.s_i, alpha)
        return np.array([self.s_i] + [v] * (self.n_arcs - 2) + [self.s_f])

    def last_sign(self) -> int:
        return self.eps_first * (-1) ** (self.n_arcs - 1)


def extremal_endpoint(seq: BangSequence, alpha: float):
    """Endpoint and total time of a bang sequence."""
    ap = AlphaParam.from_alpha(alpha)
    if seq.eps_first not in (1, -1):
        raise DomainError("eps_first must be +1 or -1")
    if not (0.0 < seq.s_i <= np.pi):
        raise DomainError("s_i must lie in (0, pi]")
    if not (1 <= seq.n_arcs <= ap.k_max + 1):
        raise DomainError(f"n_arcs must lie in [1, {ap.k_max + 1}]")
    if seq.n_arcs >= 2:
        v = interior_duration(seq.s_i, alpha)
        if not (0.0 < seq.s_f <= v + 1e-12):
            raise DomainError("s_f must lie in (0, v(s_i)]")
    d = seq.durations(alpha)
    return bang_chain(alpha, seq.eps_first, d), float(d.sum())


# -- switching curves -------------------------------------------------------


@dataclass(frozen=True)
class SwitchCurveSample:
    k: int
    eps: int
    s: float
    point: np.ndarray
    tangent: np.ndarray
    arrival_time: float


def _switch_durations(k: int, s, alpha: float):
    s = np.asarray(s, dtype=float)
    v = interior_duration(s, alpha)
    dv = interior_duration_ds(s, alpha)
    dur = np.stack([s] + [v] * k, axis=-1)
    ddur = np.stack([np.ones_like(s)] + [dv] * k, axis=-1)
    return dur, ddur


def switching_curve_points(k: int, eps: int, s, alpha: float, check: bool = True):
    """Points, tangents and arrival times of C_k^eps on an array of s.

    The last arc before the switch carries the sign eps, so the first arc
    has sign eps (-1)^k.
    """
    if check:
        ap = AlphaParam.from_alpha(alpha)
        if not (1 <= k <= ap.k_max):
            raise DomainError(f"k={k} outside [1, {ap.k_max}]")
    dur, ddur = _switch_durations(k, s, alpha)
    p, dp = bang_chain(alpha, eps * (-1) ** k, dur, ddur)
    return p, dp, switch_time(k, s, alpha)


def switching_curve(k: int, eps: int, s: float, alpha: float) -> SwitchCurveSample:
    if not (0.0 < s <= np.pi):
        raise DomainError("s must lie in (0, pi]")
    p, dp, t = switching_curve_points(k, eps, s, alpha)
    return SwitchCurveSample(k, eps, float(s), p, dp, float(t))


def switch_time_roots(j: int, k: int, alpha: float, n_scan: int = 2000):
    """Interior roots of T_j(s) = k pi on (0, pi), by sign scan plus brentq."""
    f = lambda s: float(switch_time(j, s, alpha)) - k * np.pi
    grid = np.linspace(S_DELTA, np.pi - S_DELTA, n_scan)
    vals = switch_time(j, grid, alpha) - k * np.pi
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14))
    return roots


# -- local optimality of switching curves ------------------------------------


def cone_coefficients(fields, tangent):
    """Coefficients of ``tangent`` in the basis of the two field vectors."""
    a = np.column_stack([np.asarray(f, dtype=float) for f in fields])
    # the Gram determinant cancels below ~1e-16 relative; singular values don't
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[1] <= 1e-12 * sv[0]:
        raise DomainError("degenerate basis: the two fields are parallel")
    coef, *_ = np.linalg.lstsq(a, np.asarray(tangent, dtype=float), rcond=None)
    return coef


def classify_coefficients(coef) -> str:
    """Opposite signs: locally optimal. Same signs: the curve lies inside the
    cone of admissible velocities, so trajectories reflect on it."""
    n = np.linalg.norm(coef)
    if n == 0.0:
        return CONJUGATE_POINT
    a, b = np.asarray(coef) / n
    if abs(a) <= ZERO_COEFF_TOL or abs(b) <= ZERO_COEFF_TOL:
        return CONJUGATE_POINT
    return LOCALLY_OPTIMAL if a * b < 0 else REFLECTING


def local_optimality(point, tangent, alpha: float) -> str:
    """Verdict for a curve through ``point`` with velocity ``tangent``."""
    p = np.asarray(point, dtype=float)
    xp, xm = bang_field(alpha, 1), bang_field(alpha, -1)
    return classify_coefficients(cone_coefficients((xp @ p, xm @ p), tangent))


def local_optimality_planar(z: complex, dz: complex) -> str:
    """Same test for the limit planar fields i(z + 1) (u=+1) and i(z - 1) (u=-1)."""
    f1 = 1j * (z + 1.0)
    f2 = 1j * (z - 1.0)
    coef = cone_coefficients(
        (np.array([f1.real, f1.imag]), np.array([f2.real, f2.imag])),
        np.array([dz.real, dz.imag]),
    )
    return classify_coefficients(coef)


def switching_curve_verdict(k: int, eps: int, s: float, alpha: float):
    """Local optimality of C_k^eps at s.

    At s = pi the point lies on the great circle x2 = 0 where X+ and X- are
    parallel, and the curve continues as C_{k+1}^{eps} from s = 0. There
    the result is the pair of one-sided verdicts taken S_DELTA away on each
    side.
    """
    if s < np.pi:
        smp = switching_curve(k, eps, s, alpha)
        return local_optimality(smp.point, smp.tangent, alpha)
    smp = switching_curve(k, eps, np.pi - S_DELTA, alpha)
    left = local_optimality(smp.point, smp.tangent, alpha)
    p, dp, _ = switching_curve_points(k + 1, eps, S_DELTA, alpha, check=False)
    return left, local_optimality(p, dp, alpha)
